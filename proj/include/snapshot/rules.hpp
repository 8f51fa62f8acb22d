#pragma once

// Text inputs of the manifest builder: the per-partition rules file and the
// list of files to hash, plus the two-metacharacter pattern language.
//
// Rules file grammar (lines separated by 0x0A, a trailing 0x0D is dropped,
// blank lines are skipped):
//
//   #<flags>        one of W|B and one of R|N, any order, no repeats
//   <base dir>      full path of the governed directory
//   <entry>...      patterns (R) or literal names (N), relative to base dir
//
// Pattern language: '?' matches one valid character, '*' matches zero or
// more. The path separator '\', 0x00 and 0x0A are not valid characters, so
// neither metacharacter crosses a directory boundary.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "snapshot/expected.hpp"

namespace snapshot {

inline constexpr char kPathSeparator = '\\';

enum class AclMode : std::uint8_t { Whitelist, Blacklist };
enum class AclKind : std::uint8_t { Regex, Literal };

struct AclSpec {
    std::string base_directory;
    AclMode mode = AclMode::Whitelist;
    AclKind kind = AclKind::Regex;
    std::vector<std::string> patterns;

    friend bool operator==(const AclSpec&, const AclSpec&) = default;
};

enum class RulesErrc : std::uint8_t {
    BadFlagLine,
    MissingBaseDirectory,
    DuplicateBaseDirectory,
    EmptyRuleBlock,
    MetacharacterInLiteral,
    InvalidCharacter,
    DuplicatePath,
    EmptyList,
};

std::string_view to_string(RulesErrc code) noexcept;

struct RulesError {
    RulesErrc code;
    std::size_t line = 0;  // 1-based; 0 when not tied to a line
    std::string detail;
};

Expected<std::vector<AclSpec>, RulesError> parse_rules_file(std::string_view text);

/// Inverse of parse_rules_file for well-formed specs.
std::string format_rules_file(const std::vector<AclSpec>& specs);

/// One path per line; result sorted byte-wise ascending.
Expected<std::vector<std::string>, RulesError> parse_files_list(std::string_view text);

/// True when c may be consumed by '?' or '*'.
constexpr bool is_valid_name_char(char c) noexcept
{
    return c != '\0' && c != '\n' && c != kPathSeparator;
}

constexpr bool has_metacharacter(std::string_view text) noexcept
{
    return text.find_first_of("?*") != std::string_view::npos;
}

/// Pattern-set simulation; O(|pattern| * |candidate|) time, O(|pattern|) space.
bool glob_match(std::string_view pattern, std::string_view candidate);

}  // namespace snapshot
