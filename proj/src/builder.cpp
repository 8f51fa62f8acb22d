#include "snapshot/builder.hpp"

#include <cstring>
#include <limits>
#include <map>

namespace snapshot {

namespace {

constexpr std::uint64_t kMaxBlobSize = std::numeric_limits<std::uint32_t>::max();

BuildError invariant(std::string detail)
{
    return BuildError{BuildErrc::InvariantViolation, std::move(detail)};
}

bool storable(std::string_view text)
{
    return text.find_first_of(std::string_view("\n\0", 2)) == std::string_view::npos;
}

std::optional<BuildError> validate(const BuildRequest& request)
{
    if (request.boot_partition_index) {
        if (*request.boot_partition_index >= request.partitions.size())
            return invariant("boot partition index " + std::to_string(*request.boot_partition_index) +
                             " is not below the partition count " + std::to_string(request.partitions.size()));
        if (request.booter_path.empty())
            return BuildError{BuildErrc::MissingBooterPath, "a boot partition index requires a booter path"};
        if (!storable(request.booter_path))
            return invariant("booter path contains a newline or NUL byte");
    } else if (!request.booter_path.empty()) {
        return invariant("booter path given without a boot partition index");
    }

    for (std::size_t p = 0; p < request.partitions.size(); ++p) {
        const PartitionSpec& partition = request.partitions[p];
        const std::string where = "partition " + std::to_string(p) + ": ";
        for (std::size_t i = 0; i < partition.hashed_files.size(); ++i) {
            const std::string& path = partition.hashed_files[i].path;
            if (path.empty() || !storable(path))
                return invariant(where + "file path is empty or contains a newline or NUL byte");
            if (i > 0 && compare_paths(partition.hashed_files[i - 1].path, path) >= 0)
                return invariant(where + "file list not strictly ascending at \"" + path + "\"");
        }
        for (std::size_t a = 0; a < partition.acl_specs.size(); ++a) {
            const AclSpec& acl = partition.acl_specs[a];
            if (acl.base_directory.empty() || !storable(acl.base_directory))
                return invariant(where + "ACL base directory is empty or contains a newline or NUL byte");
            for (std::size_t b = 0; b < a; ++b) {
                if (partition.acl_specs[b].base_directory == acl.base_directory)
                    return invariant(where + "duplicate ACL base directory \"" + acl.base_directory + "\"");
            }
            for (const auto& pattern : acl.patterns) {
                if (pattern.empty() || !storable(pattern))
                    return invariant(where + "ACL entry is empty or contains a newline or NUL byte");
                if (acl.kind == AclKind::Literal && has_metacharacter(pattern))
                    return invariant(where + "literal ACL entry contains a metacharacter: " + pattern);
            }
        }
    }
    return std::nullopt;
}

struct AclLayout {
    std::uint64_t offset = 0;
};

struct PartitionLayout {
    std::uint64_t offset = 0;
    std::uint64_t acl_table = 0;
    std::vector<AclLayout> acls;
};

class StringPool {
public:
    explicit StringPool(std::uint64_t start) : end_(start) {}

    void add(const std::string& text)
    {
        if (offsets_.emplace(text, end_).second) {
            order_.push_back(&text);
            end_ += text.size() + 1;
        }
    }

    std::uint64_t offset_of(const std::string& text) const { return offsets_.at(text); }
    std::uint64_t end() const { return end_; }
    const std::vector<const std::string*>& order() const { return order_; }

private:
    std::map<std::string, std::uint64_t, std::less<>> offsets_;
    std::vector<const std::string*> order_;
    std::uint64_t end_;
};

class BlobWriter {
public:
    explicit BlobWriter(std::size_t size) : bytes_(size, 0) {}

    void u32(std::uint64_t at, std::uint64_t value)
    {
        for (int i = 0; i < 4; ++i)
            bytes_[at + i] = static_cast<std::uint8_t>(value >> (8 * i));
    }

    void raw(std::uint64_t at, const std::uint8_t* data, std::size_t size)
    {
        std::memcpy(bytes_.data() + at, data, size);
    }

    ManifestBlob take() { return std::move(bytes_); }

private:
    ManifestBlob bytes_;
};

}  // namespace

std::string_view to_string(BuildErrc code) noexcept
{
    switch (code) {
    case BuildErrc::TooLarge: return "TooLarge";
    case BuildErrc::InvariantViolation: return "InvariantViolation";
    case BuildErrc::MissingBooterPath: return "MissingBooterPath";
    }
    return "Unknown";
}

Digest hash_source_file(ByteSpan content) noexcept
{
    return sha384(content);
}

Expected<ManifestBlob, BuildError> compile_manifest(const BuildRequest& request)
{
    if (auto error = validate(request))
        return unexpected(std::move(*error));

    // Sizes are accumulated in 64 bits; anything past 2^32 - 1 is refused.
    const std::uint64_t partition_count = request.partitions.size();
    std::uint64_t pos = kHeaderFixedSize + 4 * partition_count;
    std::vector<PartitionLayout> layout(request.partitions.size());
    for (std::size_t p = 0; p < request.partitions.size(); ++p) {
        const PartitionSpec& partition = request.partitions[p];
        layout[p].offset = pos;
        pos += kPartitionFixedSize + std::uint64_t{kFileEntrySize} * partition.hashed_files.size();
        layout[p].acl_table = partition.acl_specs.empty() ? 0 : pos;
        pos += 4 * std::uint64_t{partition.acl_specs.size()};
        for (const AclSpec& acl : partition.acl_specs) {
            layout[p].acls.push_back({pos});
            pos += kAclFixedSize + 4 * std::uint64_t{acl.patterns.size()};
        }
        if (pos > kMaxBlobSize)
            return unexpected(BuildError{BuildErrc::TooLarge, "fixed records exceed 4 GiB"});
    }

    StringPool pool(pos);
    if (request.boot_partition_index)
        pool.add(request.booter_path);
    for (const PartitionSpec& partition : request.partitions) {
        for (const HashedFile& file : partition.hashed_files)
            pool.add(file.path);
        for (const AclSpec& acl : partition.acl_specs) {
            pool.add(acl.base_directory);
            for (const auto& pattern : acl.patterns)
                pool.add(pattern);
        }
    }
    if (pool.end() > kMaxBlobSize)
        return unexpected(BuildError{BuildErrc::TooLarge, "string pool pushes the blob past 4 GiB"});

    BlobWriter out(static_cast<std::size_t>(pool.end()));
    out.u32(0, kStorageMagic);
    out.u32(4, kStorageVersion);
    out.u32(8, request.boot_partition_index.value_or(kBootPartitionUnused));
    out.u32(12, request.boot_partition_index ? pool.offset_of(request.booter_path) : 0);
    out.u32(16, partition_count);
    for (std::size_t p = 0; p < request.partitions.size(); ++p)
        out.u32(kHeaderFixedSize + 4 * p, layout[p].offset);

    for (std::size_t p = 0; p < request.partitions.size(); ++p) {
        const PartitionSpec& partition = request.partitions[p];
        const PartitionLayout& at = layout[p];
        out.raw(at.offset, partition.partition_type_guid.bytes.data(), 16);
        out.raw(at.offset + 16, partition.unique_partition_guid.bytes.data(), 16);
        out.u32(at.offset + 32, partition.acl_specs.size());
        out.u32(at.offset + 36, at.acl_table);
        out.u32(at.offset + 40, partition.hashed_files.size());
        for (std::size_t f = 0; f < partition.hashed_files.size(); ++f) {
            const std::uint64_t entry = at.offset + kPartitionFixedSize + kFileEntrySize * f;
            out.u32(entry, pool.offset_of(partition.hashed_files[f].path));
            out.raw(entry + 4, partition.hashed_files[f].digest.data(), kSha384DigestSize);
        }
        for (std::size_t a = 0; a < partition.acl_specs.size(); ++a) {
            const AclSpec& acl = partition.acl_specs[a];
            const std::uint64_t record = at.acls[a].offset;
            out.u32(at.acl_table + 4 * a, record);
            std::uint32_t flags = 0;
            if (acl.mode == AclMode::Whitelist)
                flags |= kAclFlagWhitelist;
            if (acl.kind == AclKind::Regex)
                flags |= kAclFlagRegex;
            out.u32(record, flags);
            out.u32(record + 4, pool.offset_of(acl.base_directory));
            out.u32(record + 8, acl.patterns.size());
            for (std::size_t r = 0; r < acl.patterns.size(); ++r)
                out.u32(record + kAclFixedSize + 4 * r, pool.offset_of(acl.patterns[r]));
        }
    }

    for (const std::string* text : pool.order()) {
        const std::uint64_t at = pool.offset_of(*text);
        out.raw(at, reinterpret_cast<const std::uint8_t*>(text->data()), text->size());
        const std::uint8_t terminator = kStringTerminator;
        out.raw(at + text->size(), &terminator, 1);
    }
    return out.take();
}

BuildRequest to_build_request(const ManifestView& view)
{
    BuildRequest request;
    const StorageSetHeader& header = view.header();
    if (header.boot_used()) {
        request.boot_partition_index = header.boot_partition_index;
        request.booter_path = std::string(header.booter_path);
    }
    for (const StoragePartitionRecord& record : view.partitions()) {
        PartitionSpec spec;
        spec.partition_type_guid = record.partition_type_guid;
        spec.unique_partition_guid = record.unique_partition_guid;
        for (const StorageFileEntry& file : record.files)
            spec.hashed_files.push_back({std::string(file.path), file.hash});
        for (const StorageAclRecord& acl : record.acls) {
            AclSpec acl_spec;
            acl_spec.base_directory = std::string(acl.directory);
            acl_spec.mode = acl.whitelist() ? AclMode::Whitelist : AclMode::Blacklist;
            acl_spec.kind = acl.regex() ? AclKind::Regex : AclKind::Literal;
            for (std::string_view rule : acl.rules)
                acl_spec.patterns.emplace_back(rule);
            spec.acl_specs.push_back(std::move(acl_spec));
        }
        request.partitions.push_back(std::move(spec));
    }
    return request;
}

Expected<BuildRequest, ParseError> decompile_manifest(ByteSpan blob)
{
    auto view = ManifestView::parse(blob);
    if (!view)
        return unexpected(view.error());
    return to_build_request(*view);
}

}  // namespace snapshot
