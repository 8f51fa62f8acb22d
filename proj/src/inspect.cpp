#include "snapshot/inspect.hpp"

#include <charconv>
#include <cstdio>

namespace snapshot {

namespace {

std::string hex32(std::uint32_t value)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08X", value);
    return buf;
}

class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    bool next(std::string_view& line)
    {
        if (text_.empty())
            return false;
        const std::size_t end = text_.find('\n');
        line = text_.substr(0, end);
        text_.remove_prefix(end == std::string_view::npos ? text_.size() : end + 1);
        ++number_;
        return true;
    }

    [[nodiscard]] std::size_t number() const noexcept { return number_; }

private:
    std::string_view text_;
    std::size_t number_ = 0;
};

std::optional<std::uint64_t> parse_count(std::string_view text)
{
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty())
        return std::nullopt;
    return value;
}

std::optional<Digest> parse_digest(std::string_view hex)
{
    if (hex.size() != 2 * kSha384DigestSize)
        return std::nullopt;
    Digest digest;
    for (std::size_t i = 0; i < digest.size(); ++i) {
        unsigned value = 0;
        const auto [end, ec] = std::from_chars(hex.data() + 2 * i, hex.data() + 2 * i + 2, value, 16);
        if (ec != std::errc() || end != hex.data() + 2 * i + 2)
            return std::nullopt;
        digest[i] = static_cast<std::uint8_t>(value);
    }
    return digest;
}

}  // namespace

std::string format_manifest_dump(const ManifestView& view)
{
    const StorageSetHeader& header = view.header();
    std::string out;
    out += "magic: " + hex32(header.magic) + "\n";
    out += "version: " + hex32(header.version) + "\n";
    out += "size: " + std::to_string(view.bytes().size()) + "\n";
    if (header.boot_used())
        out += "boot: " + std::to_string(header.boot_partition_index) + " " + std::string(header.booter_path) + "\n";
    else
        out += "boot: unused\n";
    out += "partitions: " + std::to_string(view.partitions().size()) + "\n";

    for (std::size_t p = 0; p < view.partitions().size(); ++p) {
        const StoragePartitionRecord& record = view.partitions()[p];
        out += "partition " + std::to_string(p) + ":\n";
        out += "  type: " + record.partition_type_guid.to_string() + "\n";
        out += "  unique: " + record.unique_partition_guid.to_string() + "\n";
        out += "  files: " + std::to_string(record.files.size()) + "\n";
        for (const StorageFileEntry& file : record.files)
            out += "    " + to_hex(file.hash) + " " + std::string(file.path) + "\n";
        out += "  acls: " + std::to_string(record.acls.size()) + "\n";
        for (const StorageAclRecord& acl : record.acls) {
            out += "    acl: ";
            out += acl.whitelist() ? "whitelist," : "blacklist,";
            out += acl.regex() ? "regex " : "literal ";
            out += std::string(acl.directory) + "\n";
            for (std::string_view rule : acl.rules)
                out += "      rule: " + std::string(rule) + "\n";
        }
    }
    return out;
}

Expected<BuildRequest, std::string> parse_manifest_dump(std::string_view text)
{
    LineReader reader(text);
    std::string_view line;
    auto fail = [&](const std::string& what) {
        return unexpected("dump line " + std::to_string(reader.number()) + ": " + what);
    };
    auto expect_field = [&](std::string_view key, std::string_view& value) {
        if (!reader.next(line) || !line.starts_with(key))
            return false;
        value = line.substr(key.size());
        return true;
    };

    std::string_view value;
    if (!expect_field("magic: ", value) || value != hex32(kStorageMagic))
        return fail("expected magic");
    if (!expect_field("version: ", value) || value != hex32(kStorageVersion))
        return fail("expected version");
    if (!expect_field("size: ", value) || !parse_count(value))
        return fail("expected size");

    BuildRequest request;
    if (!expect_field("boot: ", value))
        return fail("expected boot");
    if (value != "unused") {
        const std::size_t space = value.find(' ');
        auto index = parse_count(value.substr(0, space));
        if (space == std::string_view::npos || !index || *index > 0xFFFFFFFFULL)
            return fail("malformed boot line");
        request.boot_partition_index = static_cast<std::uint32_t>(*index);
        request.booter_path = std::string(value.substr(space + 1));
    }

    if (!expect_field("partitions: ", value))
        return fail("expected partitions");
    auto partition_count = parse_count(value);
    if (!partition_count)
        return fail("malformed partition count");

    for (std::uint64_t p = 0; p < *partition_count; ++p) {
        if (!reader.next(line) || line != "partition " + std::to_string(p) + ":")
            return fail("expected partition " + std::to_string(p));
        PartitionSpec spec;
        std::optional<Guid> guid;
        if (!expect_field("  type: ", value) || !(guid = Guid::parse(value)))
            return fail("expected type GUID");
        spec.partition_type_guid = *guid;
        if (!expect_field("  unique: ", value) || !(guid = Guid::parse(value)))
            return fail("expected unique GUID");
        spec.unique_partition_guid = *guid;

        if (!expect_field("  files: ", value))
            return fail("expected files");
        auto file_count = parse_count(value);
        if (!file_count)
            return fail("malformed file count");
        for (std::uint64_t f = 0; f < *file_count; ++f) {
            if (!expect_field("    ", value) || value.size() < 2 * kSha384DigestSize + 1 ||
                value[2 * kSha384DigestSize] != ' ')
                return fail("expected file entry");
            auto digest = parse_digest(value.substr(0, 2 * kSha384DigestSize));
            if (!digest)
                return fail("malformed digest");
            spec.hashed_files.push_back({std::string(value.substr(2 * kSha384DigestSize + 1)), *digest});
        }

        if (!expect_field("  acls: ", value))
            return fail("expected acls");
        auto acl_count = parse_count(value);
        if (!acl_count)
            return fail("malformed acl count");
        for (std::uint64_t a = 0; a < *acl_count; ++a) {
            if (!expect_field("    acl: ", value))
                return fail("expected acl");
            AclSpec acl;
            if (value.starts_with("whitelist,"))
                acl.mode = AclMode::Whitelist;
            else if (value.starts_with("blacklist,"))
                acl.mode = AclMode::Blacklist;
            else
                return fail("unknown acl mode");
            value.remove_prefix(10);
            if (value.starts_with("regex ")) {
                acl.kind = AclKind::Regex;
                value.remove_prefix(6);
            } else if (value.starts_with("literal ")) {
                acl.kind = AclKind::Literal;
                value.remove_prefix(8);
            } else {
                return fail("unknown acl kind");
            }
            acl.base_directory = std::string(value);

            // Rule lines are counted by peeking; the dump carries no rule count.
            LineReader lookahead = reader;
            std::string_view peek;
            while (lookahead.next(peek) && peek.starts_with("      rule: ")) {
                reader.next(line);
                acl.patterns.emplace_back(line.substr(12));
            }
            spec.acl_specs.push_back(std::move(acl));
        }
        request.partitions.push_back(std::move(spec));
    }
    if (reader.next(line))
        return fail("trailing content");
    return request;
}

}  // namespace snapshot
