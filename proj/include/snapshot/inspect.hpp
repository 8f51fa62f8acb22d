#pragma once

#include <string>
#include <string_view>

#include "snapshot/builder.hpp"
#include "snapshot/expected.hpp"
#include "snapshot/manifest_format.hpp"

namespace snapshot {

/// Stable, diff-friendly text rendering of a validated manifest:
///
///   magic: 0x484F5353
///   version: 0x10010000
///   size: <bytes>
///   boot: unused | boot: <index> <booter path>
///   partitions: <n>
///   partition <i>:
///     type: <guid>
///     unique: <guid>
///     files: <n>
///       <96 hex digits> <path>
///     acls: <n>
///       acl: <whitelist|blacklist>,<regex|literal> <base directory>
///         rule: <entry>
///
/// Paths and entries run to the end of their line verbatim.
std::string format_manifest_dump(const ManifestView& view);

/// Reconstructs the request a dump describes.
Expected<BuildRequest, std::string> parse_manifest_dump(std::string_view text);

}  // namespace snapshot
