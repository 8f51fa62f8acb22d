#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "snapshot/guid.hpp"
#include "snapshot/manifest_format.hpp"
#include "snapshot/sha384.hpp"

namespace snapshot {

/// What the verifier needs from one disk partition. Paths are presented in
/// manifest form, with '\' separators.
class PartitionProvider {
public:
    virtual ~PartitionProvider() = default;

    [[nodiscard]] virtual Guid partition_type_guid() const = 0;
    [[nodiscard]] virtual Guid unique_partition_guid() const = 0;

    /// Whole file content in one buffer, or nullopt when absent/unreadable.
    virtual std::optional<std::vector<std::uint8_t>> read_file(std::string_view path) = 0;

    /// Relative paths of every non-directory entry beneath base_directory,
    /// recursively, or nullopt when the directory does not exist.
    virtual std::optional<std::vector<std::string>> walk(std::string_view base_directory) = 0;
};

enum class DenialKind : std::uint8_t {
    ManifestMalformed,
    DuplicateUniqueGuid,
    PartitionNotFound,
    TypeGuidMismatch,
    FileMissing,
    HashMismatch,
    AclViolation,
    BooterUnresolvable,
};

std::string_view to_string(DenialKind kind) noexcept;

struct DenialReason {
    DenialKind kind = DenialKind::ManifestMalformed;
    std::optional<ParseError> parse_error;     // ManifestMalformed
    std::optional<std::uint32_t> partition;    // manifest partition index
    std::optional<Guid> guid;                  // DuplicateUniqueGuid, PartitionNotFound
    std::string path;                          // file path, or offending relative path
    std::string directory;                     // AclViolation base directory

    /// One-line token form, e.g. "HashMismatch partition=0 path=boot\ldr".
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const DenialReason&, const DenialReason&) = default;
};

/// The six check stages, in execution order.
enum class Stage : std::uint8_t { Header, GuidUniqueness, PartitionBinding, FileHashes, Acls, BootTarget };

inline constexpr std::size_t kStageCount = 6;

struct BootTarget {
    std::uint32_t partition = 0;
    std::string booter_path;
    /// The exact buffer that was hashed and matched; hand this off rather
    /// than reading the file again.
    std::vector<std::uint8_t> booter_image;
};

struct BootDecision {
    enum class Outcome : std::uint8_t { Allowed, AllowedNoBoot, Denied };

    Outcome outcome = Outcome::Denied;
    std::optional<BootTarget> target;    // Allowed
    std::optional<DenialReason> denial;  // Denied
    std::vector<Stage> completed_stages;

    [[nodiscard]] bool allowed() const noexcept { return outcome != Outcome::Denied; }
    /// "ALLOW <idx> <path>", "ALLOW none" or "DENY <reason>".
    [[nodiscard]] std::string verdict_line() const;
};

struct VerifyPolicy {
    /// When false, an ACL whose base directory is absent is vacuously met.
    bool missing_acl_directory_is_violation = false;
};

using VerifiedFileCallback = std::function<void(std::string_view path, std::span<const std::uint8_t> content)>;

/// Reads each listed file once, hashes that buffer, and compares it with the
/// stored digest. Stops at the first failure. on_verified sees each matching
/// buffer before it is released.
std::optional<DenialReason> check_file_hashes(const StoragePartitionRecord& partition, PartitionProvider& provider,
                                              ByteSpan blob, const VerifiedFileCallback& on_verified = {});

std::optional<DenialReason> check_acl(const StorageAclRecord& acl, PartitionProvider& provider, ByteSpan blob,
                                      const VerifyPolicy& policy = {});

/// Binary search over the sorted file array.
std::optional<Digest> lookup_file_hash(const StoragePartitionRecord& partition, std::string_view path,
                                       ByteSpan blob);

/// The booter must be one of the boot partition's hashed files, and its
/// verified content must be at hand.
Expected<BootTarget, DenialReason> resolve_boot_target(const ManifestView& view,
                                                       std::optional<std::vector<std::uint8_t>> verified_image);

BootDecision verify_system(ByteSpan blob, std::span<PartitionProvider* const> providers,
                           const VerifyPolicy& policy = {});

}  // namespace snapshot
