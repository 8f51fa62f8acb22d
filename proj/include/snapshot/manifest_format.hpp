#pragma once

// On-disk layout of the storage-set manifest and a size-bounded reader.
//
// All integers are little-endian and all records are packed:
//
//   StorageSet        magic u32 | version u32 | boot_partition_index u32 |
//                     booter_file_offset u32 | number_of_partitions u32 |
//                     partition_offsets u32[number_of_partitions]
//   StoragePartition  partition_type_guid[16] | unique_partition_guid[16] |
//                     number_of_acl_rules u32 | acl_rule_offset u32 |
//                     number_of_files u32 | files StorageFile[number_of_files]
//   StorageFile       path_offset u32 | hash[48]
//   acl table         u32[number_of_acl_rules], each locating a StorageAcl
//   StorageAcl        flags u32 | directory_offset u32 | number_of_rules u32 |
//                     rule_offsets u32[number_of_rules]
//   string            ASCII bytes terminated by 0x0A
//
// Every offset is relative to the start of the blob. No reader touches a
// byte at or beyond the length of the span it was handed.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "snapshot/expected.hpp"
#include "snapshot/guid.hpp"
#include "snapshot/sha384.hpp"

namespace snapshot {

using ByteSpan = std::span<const std::uint8_t>;

inline constexpr std::uint32_t kStorageMagic = 0x484F5353;  // 'S','S','O','H'
inline constexpr std::uint32_t kStorageVersion = 0x10010000;
inline constexpr std::uint32_t kBootPartitionUnused = 0xFFFFFFFF;

inline constexpr std::uint32_t kAclFlagWhitelist = 1U << 0;
inline constexpr std::uint32_t kAclFlagRegex = 1U << 1;
inline constexpr std::uint32_t kAclFlagMask = kAclFlagWhitelist | kAclFlagRegex;

inline constexpr std::uint32_t kHeaderFixedSize = 20;
inline constexpr std::uint32_t kPartitionFixedSize = 44;
inline constexpr std::uint32_t kFileEntrySize = 52;
inline constexpr std::uint32_t kAclFixedSize = 12;
inline constexpr char kStringTerminator = '\n';

enum class ParseError : std::uint8_t {
    BadMagic,
    BadVersion,
    Truncated,
    BootIndexOutOfRange,
    OffsetOutOfBounds,
    ArithmeticOverflow,
    UnsortedFileArray,
    BadString,
    UnterminatedString,
    BadAclFlags,
    DuplicateBaseDirectory,
    // More decoded entries than the blob could hold without records
    // aliasing each other.
    RecordBudgetExceeded,
};

std::string_view to_string(ParseError error) noexcept;

template <typename T>
using ParseResult = Expected<T, ParseError>;

/// The single arithmetic gate for all readers: base + count * elem_size,
/// computed without wraparound and required to be <= limit.
ParseResult<std::uint32_t> checked_span(std::uint32_t base, std::uint32_t count,
                                        std::uint32_t elem_size, std::uint32_t limit) noexcept;

struct StorageSetHeader {
    std::uint32_t magic = 0;
    std::uint32_t version = 0;
    std::uint32_t boot_partition_index = kBootPartitionUnused;
    std::uint32_t booter_file_offset = 0;
    std::vector<std::uint32_t> partition_offsets;
    /// Only meaningful when boot_used().
    std::string_view booter_path;

    [[nodiscard]] bool boot_used() const noexcept { return boot_partition_index != kBootPartitionUnused; }
    [[nodiscard]] std::uint32_t number_of_partitions() const noexcept
    {
        return static_cast<std::uint32_t>(partition_offsets.size());
    }
};

struct StorageFileEntry {
    std::uint32_t path_offset = 0;
    std::string_view path;
    Digest hash{};
};

struct StorageAclRecord {
    std::uint32_t flags = 0;
    std::uint32_t directory_offset = 0;
    std::string_view directory;
    std::vector<std::uint32_t> rule_offsets;
    std::vector<std::string_view> rules;

    [[nodiscard]] bool whitelist() const noexcept { return (flags & kAclFlagWhitelist) != 0; }
    [[nodiscard]] bool regex() const noexcept { return (flags & kAclFlagRegex) != 0; }
};

struct StoragePartitionRecord {
    Guid partition_type_guid;
    Guid unique_partition_guid;
    std::uint32_t acl_rule_offset = 0;
    std::vector<std::uint32_t> acl_offsets;
    std::vector<StorageAclRecord> acls;
    std::vector<StorageFileEntry> files;
};

// Decoded records hold string_views into the blob; the blob must outlive them.

/// Bytes from offset up to, not including, the 0x0A terminator. Interior
/// NUL bytes are rejected with BadString.
ParseResult<std::string_view> read_string(ByteSpan blob, std::uint32_t offset);

ParseResult<StorageSetHeader> read_header(ByteSpan blob);
ParseResult<StorageAclRecord> read_acl(ByteSpan blob, std::uint32_t offset);
ParseResult<StoragePartitionRecord> read_partition(ByteSpan blob, std::uint32_t offset);

/// Fully validated manifest. Immutable once constructed; shares the
/// caller's bytes, which must outlive the view.
class ManifestView {
public:
    static ParseResult<ManifestView> parse(ByteSpan blob);

    [[nodiscard]] ByteSpan bytes() const noexcept { return bytes_; }
    [[nodiscard]] const StorageSetHeader& header() const noexcept { return header_; }
    [[nodiscard]] const std::vector<StoragePartitionRecord>& partitions() const noexcept { return partitions_; }

private:
    ManifestView() = default;

    ByteSpan bytes_;
    StorageSetHeader header_;
    std::vector<StoragePartitionRecord> partitions_;
};

/// Byte-wise unsigned ordering used for the sorted file array.
int compare_paths(std::string_view lhs, std::string_view rhs) noexcept;

}  // namespace snapshot
