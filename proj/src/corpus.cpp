#include "snapshot/corpus.hpp"

#include <random>
#include <stdexcept>

namespace snapshot {

namespace {

Guid guid_of(std::string_view text)
{
    auto guid = Guid::parse(text);
    if (!guid)
        throw std::logic_error("bad fixture GUID");
    return *guid;
}

void put_le32(ManifestBlob& blob, std::uint32_t at, std::uint32_t value)
{
    for (int i = 0; i < 4; ++i)
        blob[at + i] = static_cast<std::uint8_t>(value >> (8 * i));
}

}  // namespace

ReferenceFixture make_reference_fixture()
{
    const Guid basic_data = guid_of("ebd0a0a2-b9e5-4433-87c0-68b6b72699c7");
    const Guid system_unique = guid_of("6a1c3f52-0d7e-4b1a-9c55-2f0e8d4b7a10");
    const Guid efi_system = guid_of("c12a7328-f81f-11d2-ba4b-00a0c93ec93b");

    ReferenceFixture fixture;
    fixture.providers.emplace_back(basic_data, system_unique);
    fixture.providers.emplace_back(efi_system, Guid{});
    MemoryProvider& system = fixture.providers[0];
    MemoryProvider& esp = fixture.providers[1];

    system.add_file("C:\\Windows\\Boot\\PCAT\\bootmgr", "BOOTMGR image v1");
    system.add_file("C:\\Windows\\Boot\\PCAT\\memtest.exe", "memtest");
    system.add_file("C:\\Windows\\System32\\ntoskrnl.exe", "kernel image");
    system.add_file("C:\\Windows\\System32\\winload.exe", "winload");
    system.add_file("C:\\Program Files\\Common Files\\System\\msadc\\msadce.dll", "msadce");
    system.add_file("C:\\Program Files\\Common Files\\System\\msadc\\handler.inc", "handler");
    system.add_file("C:\\Program Files\\Common Files\\System\\msadc\\msadc.reg", "reg");
    system.add_file("C:\\Program Files\\Common Files\\System\\msadc\\ru-RU\\msadce.dll.mui", "mui");

    esp.add_file("EFI\\BOOT\\BOOTX64.EFI", "shim");
    esp.add_file("EFI\\Microsoft\\Boot\\bootmgfw.efi", "bootmgfw");

    PartitionSpec system_spec;
    system_spec.partition_type_guid = basic_data;
    system_spec.unique_partition_guid = system_unique;
    for (const char* path : {"C:\\Windows\\Boot\\PCAT\\bootmgr", "C:\\Windows\\System32\\ntoskrnl.exe",
                             "C:\\Windows\\System32\\winload.exe"}) {
        system_spec.hashed_files.push_back({path, sha384(*system.read_file(path))});
    }
    system_spec.acl_specs.push_back({"C:\\Program Files\\Common Files\\System\\msadc",
                                     AclMode::Whitelist,
                                     AclKind::Regex,
                                     {"*.dll", "*.inc", "*.reg", "ru-RU\\*.dll.mui"}});
    system_spec.acl_specs.push_back(
        {"C:\\Windows\\Boot\\PCAT", AclMode::Blacklist, AclKind::Literal, {"DtcInstall.log"}});

    PartitionSpec esp_spec;
    esp_spec.partition_type_guid = efi_system;
    for (const char* path : {"EFI\\BOOT\\BOOTX64.EFI", "EFI\\Microsoft\\Boot\\bootmgfw.efi"})
        esp_spec.hashed_files.push_back({path, sha384(*esp.read_file(path))});
    esp_spec.acl_specs.push_back({"EFI\\BOOT", AclMode::Whitelist, AclKind::Regex, {"*.EFI"}});

    fixture.request.partitions = {system_spec, esp_spec};
    fixture.request.boot_partition_index = 0;
    fixture.request.booter_path = "C:\\Windows\\Boot\\PCAT\\bootmgr";

    auto blob = compile_manifest(fixture.request);
    if (!blob)
        throw std::logic_error("reference fixture does not compile: " + blob.error().detail);
    fixture.blob = std::move(*blob);
    return fixture;
}

std::vector<FieldLocation> enumerate_fields(const ManifestView& view)
{
    std::vector<FieldLocation> fields = {
        {"header.magic", 0, false},
        {"header.version", 4, false},
        {"header.boot_partition_index", 8, false},
        {"header.booter_file_offset", 12, true},
        {"header.number_of_partitions", 16, false},
    };
    const StorageSetHeader& header = view.header();
    for (std::uint32_t p = 0; p < header.number_of_partitions(); ++p) {
        const std::string tag = "partition[" + std::to_string(p) + "]";
        const std::uint32_t base = header.partition_offsets[p];
        fields.push_back({"header.partition_offsets[" + std::to_string(p) + "]", kHeaderFixedSize + 4 * p, true});
        for (std::uint32_t w = 0; w < 8; ++w)
            fields.push_back({tag + ".guid_word[" + std::to_string(w) + "]", base + 4 * w, false});
        fields.push_back({tag + ".number_of_acl_rules", base + 32, false});
        fields.push_back({tag + ".acl_rule_offset", base + 36, true});
        fields.push_back({tag + ".number_of_files", base + 40, false});

        const StoragePartitionRecord& record = view.partitions()[p];
        for (std::uint32_t f = 0; f < record.files.size(); ++f)
            fields.push_back({tag + ".files[" + std::to_string(f) + "].offset",
                              base + kPartitionFixedSize + kFileEntrySize * f, true});
        for (std::uint32_t a = 0; a < record.acls.size(); ++a) {
            const std::string acl_tag = tag + ".acl[" + std::to_string(a) + "]";
            const std::uint32_t acl_base = record.acl_offsets[a];
            fields.push_back({tag + ".acl_table[" + std::to_string(a) + "]", record.acl_rule_offset + 4 * a, true});
            fields.push_back({acl_tag + ".flags", acl_base, false});
            fields.push_back({acl_tag + ".directory_offset", acl_base + 4, true});
            fields.push_back({acl_tag + ".number_of_rules", acl_base + 8, false});
            for (std::uint32_t r = 0; r < record.acls[a].rules.size(); ++r)
                fields.push_back({acl_tag + ".rules[" + std::to_string(r) + "]", acl_base + kAclFixedSize + 4 * r,
                                  true});
        }
    }
    return fields;
}

std::vector<NamedBlob> field_mutations(const ManifestBlob& blob, std::uint64_t seed)
{
    auto view = ManifestView::parse(blob);
    if (!view)
        throw std::invalid_argument("field_mutations needs a valid manifest");

    std::mt19937_64 rng(seed);
    const auto length = static_cast<std::uint32_t>(blob.size());
    std::vector<NamedBlob> out;
    for (const FieldLocation& field : enumerate_fields(*view)) {
        std::vector<std::pair<std::string, std::uint32_t>> values = {
            {"0", 0},
            {"1", 1},
            {"max", 0xFFFFFFFF},
            {"random", static_cast<std::uint32_t>(rng())},
        };
        if (field.holds_offset) {
            values.emplace_back("blob_end", length);
            values.emplace_back("blob_last", length - 1);
        }
        for (const auto& [label, value] : values) {
            NamedBlob mutated{field.name + "=" + label, blob};
            put_le32(mutated.bytes, field.offset, value);
            out.push_back(std::move(mutated));
        }
    }
    return out;
}

std::vector<NamedBlob> truncations(const ManifestBlob& blob)
{
    std::vector<NamedBlob> out;
    for (std::size_t cut = 0; cut < blob.size(); cut += 4)
        out.push_back({"truncate@" + std::to_string(cut), ManifestBlob(blob.begin(), blob.begin() + cut)});
    return out;
}

std::vector<NamedBlob> make_seed_corpus(std::uint64_t seed)
{
    const ReferenceFixture fixture = make_reference_fixture();
    std::vector<NamedBlob> corpus;
    corpus.push_back({"valid", fixture.blob});
    for (auto& blob : field_mutations(fixture.blob, seed))
        corpus.push_back(std::move(blob));
    for (auto& blob : truncations(fixture.blob))
        corpus.push_back(std::move(blob));
    return corpus;
}

}  // namespace snapshot
