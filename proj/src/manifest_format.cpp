#include "snapshot/manifest_format.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

namespace snapshot {

namespace {

constexpr std::uint64_t kMaxU32 = std::numeric_limits<std::uint32_t>::max();

// Callers must have established offset + 4 <= blob.size() via checked_span.
std::uint32_t load_le32(ByteSpan blob, std::uint32_t offset) noexcept
{
    const std::uint8_t* p = blob.data() + offset;
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

ParseResult<std::uint32_t> blob_length(ByteSpan blob) noexcept
{
    if (blob.size() > kMaxU32)
        return unexpected(ParseError::ArithmeticOverflow);
    return static_cast<std::uint32_t>(blob.size());
}

/// Counts decoded table entries. A blob whose records do not alias each
/// other spends at least four bytes per entry.
class EntryBudget {
public:
    explicit EntryBudget(std::uint32_t length) noexcept : remaining_(length / 4) {}

    bool take(std::uint32_t count) noexcept
    {
        if (count > remaining_)
            return false;
        remaining_ -= count;
        return true;
    }

private:
    std::uint32_t remaining_;
};

ParseResult<StorageAclRecord> read_acl_impl(ByteSpan blob, std::uint32_t length, std::uint32_t offset,
                                            EntryBudget& budget)
{
    auto fixed_end = checked_span(offset, 1, kAclFixedSize, length);
    if (!fixed_end)
        return unexpected(fixed_end.error());

    StorageAclRecord acl;
    acl.flags = load_le32(blob, offset);
    acl.directory_offset = load_le32(blob, offset + 4);
    const std::uint32_t rule_count = load_le32(blob, offset + 8);
    if ((acl.flags & ~kAclFlagMask) != 0)
        return unexpected(ParseError::BadAclFlags);

    auto table_end = checked_span(*fixed_end, rule_count, 4, length);
    if (!table_end)
        return unexpected(table_end.error());
    if (!budget.take(rule_count))
        return unexpected(ParseError::RecordBudgetExceeded);

    auto directory = read_string(blob, acl.directory_offset);
    if (!directory)
        return unexpected(directory.error());
    acl.directory = *directory;

    acl.rule_offsets.reserve(rule_count);
    acl.rules.reserve(rule_count);
    for (std::uint32_t i = 0; i < rule_count; ++i) {
        const std::uint32_t rule_offset = load_le32(blob, *fixed_end + 4 * i);
        auto rule = read_string(blob, rule_offset);
        if (!rule)
            return unexpected(rule.error());
        acl.rule_offsets.push_back(rule_offset);
        acl.rules.push_back(*rule);
    }
    return acl;
}

ParseResult<StoragePartitionRecord> read_partition_impl(ByteSpan blob, std::uint32_t length,
                                                        std::uint32_t offset, EntryBudget& budget)
{
    auto fixed_end = checked_span(offset, 1, kPartitionFixedSize, length);
    if (!fixed_end)
        return unexpected(fixed_end.error());

    StoragePartitionRecord record;
    std::memcpy(record.partition_type_guid.bytes.data(), blob.data() + offset, 16);
    std::memcpy(record.unique_partition_guid.bytes.data(), blob.data() + offset + 16, 16);
    const std::uint32_t acl_count = load_le32(blob, offset + 32);
    record.acl_rule_offset = load_le32(blob, offset + 36);
    const std::uint32_t file_count = load_le32(blob, offset + 40);

    auto files_end = checked_span(*fixed_end, file_count, kFileEntrySize, length);
    if (!files_end)
        return unexpected(files_end.error());
    if (!budget.take(file_count))
        return unexpected(ParseError::RecordBudgetExceeded);

    record.files.reserve(file_count);
    for (std::uint32_t i = 0; i < file_count; ++i) {
        const std::uint32_t entry = *fixed_end + kFileEntrySize * i;
        StorageFileEntry file;
        file.path_offset = load_le32(blob, entry);
        std::memcpy(file.hash.data(), blob.data() + entry + 4, kSha384DigestSize);
        auto path = read_string(blob, file.path_offset);
        if (!path)
            return unexpected(path.error());
        file.path = *path;
        if (!record.files.empty() && compare_paths(record.files.back().path, file.path) >= 0)
            return unexpected(ParseError::UnsortedFileArray);
        record.files.push_back(file);
    }

    if (record.acl_rule_offset >= length)
        return unexpected(ParseError::OffsetOutOfBounds);
    auto table_end = checked_span(record.acl_rule_offset, acl_count, 4, length);
    if (!table_end)
        return unexpected(table_end.error());
    if (!budget.take(acl_count))
        return unexpected(ParseError::RecordBudgetExceeded);

    record.acl_offsets.reserve(acl_count);
    record.acls.reserve(acl_count);
    for (std::uint32_t i = 0; i < acl_count; ++i) {
        const std::uint32_t acl_offset = load_le32(blob, record.acl_rule_offset + 4 * i);
        auto acl = read_acl_impl(blob, length, acl_offset, budget);
        if (!acl)
            return unexpected(acl.error());
        record.acl_offsets.push_back(acl_offset);
        record.acls.push_back(std::move(*acl));
    }

    std::vector<std::string_view> directories;
    directories.reserve(record.acls.size());
    for (const auto& acl : record.acls)
        directories.push_back(acl.directory);
    std::sort(directories.begin(), directories.end());
    if (std::adjacent_find(directories.begin(), directories.end()) != directories.end())
        return unexpected(ParseError::DuplicateBaseDirectory);

    return record;
}

}  // namespace

std::string_view to_string(ParseError error) noexcept
{
    switch (error) {
    case ParseError::BadMagic: return "BadMagic";
    case ParseError::BadVersion: return "BadVersion";
    case ParseError::Truncated: return "Truncated";
    case ParseError::BootIndexOutOfRange: return "BootIndexOutOfRange";
    case ParseError::OffsetOutOfBounds: return "OffsetOutOfBounds";
    case ParseError::ArithmeticOverflow: return "ArithmeticOverflow";
    case ParseError::UnsortedFileArray: return "UnsortedFileArray";
    case ParseError::BadString: return "BadString";
    case ParseError::UnterminatedString: return "UnterminatedString";
    case ParseError::BadAclFlags: return "BadAclFlags";
    case ParseError::DuplicateBaseDirectory: return "DuplicateBaseDirectory";
    case ParseError::RecordBudgetExceeded: return "RecordBudgetExceeded";
    }
    return "Unknown";
}

ParseResult<std::uint32_t> checked_span(std::uint32_t base, std::uint32_t count, std::uint32_t elem_size,
                                        std::uint32_t limit) noexcept
{
    std::uint32_t product = 0;
    std::uint32_t end = 0;
    if (__builtin_mul_overflow(count, elem_size, &product))
        return unexpected(ParseError::ArithmeticOverflow);
    if (__builtin_add_overflow(base, product, &end))
        return unexpected(ParseError::ArithmeticOverflow);
    if (end > limit)
        return unexpected(ParseError::OffsetOutOfBounds);
    return end;
}

int compare_paths(std::string_view lhs, std::string_view rhs) noexcept
{
    const std::size_t common = std::min(lhs.size(), rhs.size());
    if (common != 0) {
        if (const int c = std::memcmp(lhs.data(), rhs.data(), common); c != 0)
            return c < 0 ? -1 : 1;
    }
    if (lhs.size() == rhs.size())
        return 0;
    return lhs.size() < rhs.size() ? -1 : 1;
}

ParseResult<std::string_view> read_string(ByteSpan blob, std::uint32_t offset)
{
    auto length = blob_length(blob);
    if (!length)
        return unexpected(length.error());
    if (offset >= *length)
        return unexpected(ParseError::OffsetOutOfBounds);
    for (std::uint32_t i = offset; i < *length; ++i) {
        if (blob[i] == static_cast<std::uint8_t>(kStringTerminator))
            return std::string_view(reinterpret_cast<const char*>(blob.data() + offset), i - offset);
        if (blob[i] == 0)
            return unexpected(ParseError::BadString);
    }
    return unexpected(ParseError::UnterminatedString);
}

ParseResult<StorageSetHeader> read_header(ByteSpan blob)
{
    auto length = blob_length(blob);
    if (!length)
        return unexpected(length.error());
    if (*length < kHeaderFixedSize)
        return unexpected(ParseError::Truncated);

    StorageSetHeader header;
    header.magic = load_le32(blob, 0);
    header.version = load_le32(blob, 4);
    header.boot_partition_index = load_le32(blob, 8);
    header.booter_file_offset = load_le32(blob, 12);
    const std::uint32_t partition_count = load_le32(blob, 16);

    if (header.magic != kStorageMagic)
        return unexpected(ParseError::BadMagic);
    if (header.version != kStorageVersion)
        return unexpected(ParseError::BadVersion);

    auto table_end = checked_span(kHeaderFixedSize, partition_count, 4, *length);
    if (!table_end) {
        if (table_end.error() == ParseError::OffsetOutOfBounds)
            return unexpected(ParseError::Truncated);
        return unexpected(table_end.error());
    }
    if (header.boot_used() && header.boot_partition_index >= partition_count)
        return unexpected(ParseError::BootIndexOutOfRange);

    header.partition_offsets.reserve(partition_count);
    for (std::uint32_t i = 0; i < partition_count; ++i) {
        const std::uint32_t offset = load_le32(blob, kHeaderFixedSize + 4 * i);
        auto record_end = checked_span(offset, 1, kPartitionFixedSize, *length);
        if (!record_end)
            return unexpected(record_end.error());
        header.partition_offsets.push_back(offset);
    }

    if (header.boot_used()) {
        auto booter = read_string(blob, header.booter_file_offset);
        if (!booter)
            return unexpected(booter.error());
        header.booter_path = *booter;
    }
    return header;
}

ParseResult<StorageAclRecord> read_acl(ByteSpan blob, std::uint32_t offset)
{
    auto length = blob_length(blob);
    if (!length)
        return unexpected(length.error());
    EntryBudget budget(*length);
    return read_acl_impl(blob, *length, offset, budget);
}

ParseResult<StoragePartitionRecord> read_partition(ByteSpan blob, std::uint32_t offset)
{
    auto length = blob_length(blob);
    if (!length)
        return unexpected(length.error());
    EntryBudget budget(*length);
    return read_partition_impl(blob, *length, offset, budget);
}

ParseResult<ManifestView> ManifestView::parse(ByteSpan blob)
{
    auto header = read_header(blob);
    if (!header)
        return unexpected(header.error());
    const auto length = static_cast<std::uint32_t>(blob.size());

    EntryBudget budget(length);
    if (!budget.take(header->number_of_partitions()))
        return unexpected(ParseError::RecordBudgetExceeded);

    ManifestView view;
    view.bytes_ = blob;
    view.partitions_.reserve(header->partition_offsets.size());
    for (std::uint32_t offset : header->partition_offsets) {
        auto record = read_partition_impl(blob, length, offset, budget);
        if (!record)
            return unexpected(record.error());
        view.partitions_.push_back(std::move(*record));
    }
    view.header_ = std::move(*header);
    return view;
}

}  // namespace snapshot
