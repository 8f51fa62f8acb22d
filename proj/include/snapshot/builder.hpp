#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "snapshot/expected.hpp"
#include "snapshot/guid.hpp"
#include "snapshot/manifest_format.hpp"
#include "snapshot/rules.hpp"
#include "snapshot/sha384.hpp"

namespace snapshot {

struct HashedFile {
    std::string path;
    Digest digest{};

    friend bool operator==(const HashedFile&, const HashedFile&) = default;
};

struct PartitionSpec {
    Guid partition_type_guid;
    Guid unique_partition_guid;
    std::vector<HashedFile> hashed_files;  // strictly ascending by path
    std::vector<AclSpec> acl_specs;

    friend bool operator==(const PartitionSpec&, const PartitionSpec&) = default;
};

struct BuildRequest {
    std::vector<PartitionSpec> partitions;
    std::optional<std::uint32_t> boot_partition_index;  // nullopt: no boot target
    std::string booter_path;                            // required iff an index is set

    friend bool operator==(const BuildRequest&, const BuildRequest&) = default;
};

enum class BuildErrc : std::uint8_t { TooLarge, InvariantViolation, MissingBooterPath };

std::string_view to_string(BuildErrc code) noexcept;

struct BuildError {
    BuildErrc code;
    std::string detail;
};

using ManifestBlob = std::vector<std::uint8_t>;

Digest hash_source_file(ByteSpan content) noexcept;

/// Deterministic layout: header and partition offset table; then for each
/// partition its record, ACL offset table and ACL records; then one string
/// pool shared by the whole blob, deduplicated by exact bytes.
Expected<ManifestBlob, BuildError> compile_manifest(const BuildRequest& request);

BuildRequest to_build_request(const ManifestView& view);

Expected<BuildRequest, ParseError> decompile_manifest(ByteSpan blob);

}  // namespace snapshot
