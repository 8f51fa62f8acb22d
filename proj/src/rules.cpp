#include "snapshot/rules.hpp"

#include <algorithm>
#include <set>

namespace snapshot {

namespace {

struct Line {
    std::size_t number;
    std::string_view text;
};

std::vector<Line> split_lines(std::string_view text)
{
    std::vector<Line> lines;
    std::size_t number = 1;
    while (!text.empty()) {
        const std::size_t end = text.find('\n');
        std::string_view line = text.substr(0, end);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (!line.empty())
            lines.push_back({number, line});
        if (end == std::string_view::npos)
            break;
        text.remove_prefix(end + 1);
        ++number;
    }
    return lines;
}

RulesError make_error(RulesErrc code, std::size_t line, std::string detail)
{
    return RulesError{code, line, std::move(detail)};
}

bool is_flag_line(std::string_view line)
{
    return !line.empty() && line.front() == '#';
}

Expected<AclSpec, RulesError> parse_flags(const Line& line)
{
    bool mode_seen = false;
    bool kind_seen = false;
    AclSpec spec;
    for (char c : line.text.substr(1)) {
        switch (c) {
        case 'W':
        case 'B':
            if (mode_seen)
                return unexpected(make_error(RulesErrc::BadFlagLine, line.number, "more than one of W/B"));
            mode_seen = true;
            spec.mode = c == 'W' ? AclMode::Whitelist : AclMode::Blacklist;
            break;
        case 'R':
        case 'N':
            if (kind_seen)
                return unexpected(make_error(RulesErrc::BadFlagLine, line.number, "more than one of R/N"));
            kind_seen = true;
            spec.kind = c == 'R' ? AclKind::Regex : AclKind::Literal;
            break;
        default:
            return unexpected(
                make_error(RulesErrc::BadFlagLine, line.number, std::string("unknown flag '") + c + "'"));
        }
    }
    if (!mode_seen)
        return unexpected(make_error(RulesErrc::BadFlagLine, line.number, "missing W or B"));
    if (!kind_seen)
        return unexpected(make_error(RulesErrc::BadFlagLine, line.number, "missing R or N"));
    return spec;
}

}  // namespace

std::string_view to_string(RulesErrc code) noexcept
{
    switch (code) {
    case RulesErrc::BadFlagLine: return "BadFlagLine";
    case RulesErrc::MissingBaseDirectory: return "MissingBaseDirectory";
    case RulesErrc::DuplicateBaseDirectory: return "DuplicateBaseDirectory";
    case RulesErrc::EmptyRuleBlock: return "EmptyRuleBlock";
    case RulesErrc::MetacharacterInLiteral: return "MetacharacterInLiteral";
    case RulesErrc::InvalidCharacter: return "InvalidCharacter";
    case RulesErrc::DuplicatePath: return "DuplicatePath";
    case RulesErrc::EmptyList: return "EmptyList";
    }
    return "Unknown";
}

Expected<std::vector<AclSpec>, RulesError> parse_rules_file(std::string_view text)
{
    const std::vector<Line> lines = split_lines(text);
    std::vector<AclSpec> specs;
    std::set<std::string, std::less<>> directories;

    std::size_t i = 0;
    while (i < lines.size()) {
        const Line& flag_line = lines[i];
        if (!is_flag_line(flag_line.text))
            return unexpected(make_error(RulesErrc::BadFlagLine, flag_line.number, "expected a flag line"));
        auto spec = parse_flags(flag_line);
        if (!spec)
            return unexpected(spec.error());
        ++i;

        if (i == lines.size() || is_flag_line(lines[i].text))
            return unexpected(make_error(RulesErrc::MissingBaseDirectory, flag_line.number,
                                         "flag line not followed by a base directory"));
        const Line& dir_line = lines[i];
        if (dir_line.text.find('\0') != std::string_view::npos)
            return unexpected(make_error(RulesErrc::InvalidCharacter, dir_line.number, "NUL byte"));
        if (directories.contains(dir_line.text))
            return unexpected(make_error(RulesErrc::DuplicateBaseDirectory, dir_line.number,
                                         std::string(dir_line.text)));
        directories.emplace(dir_line.text);
        spec->base_directory = std::string(dir_line.text);
        ++i;

        for (; i < lines.size() && !is_flag_line(lines[i].text); ++i) {
            const Line& entry = lines[i];
            if (entry.text.find('\0') != std::string_view::npos)
                return unexpected(make_error(RulesErrc::InvalidCharacter, entry.number, "NUL byte"));
            if (spec->kind == AclKind::Literal && has_metacharacter(entry.text))
                return unexpected(make_error(RulesErrc::MetacharacterInLiteral, entry.number,
                                             std::string(entry.text)));
            spec->patterns.emplace_back(entry.text);
        }
        if (spec->patterns.empty())
            return unexpected(make_error(RulesErrc::EmptyRuleBlock, flag_line.number,
                                         "no entries for " + spec->base_directory));
        specs.push_back(std::move(*spec));
    }
    return specs;
}

std::string format_rules_file(const std::vector<AclSpec>& specs)
{
    std::string out;
    for (const auto& spec : specs) {
        out += '#';
        out += spec.mode == AclMode::Whitelist ? 'W' : 'B';
        out += spec.kind == AclKind::Regex ? 'R' : 'N';
        out += '\n';
        out += spec.base_directory;
        out += '\n';
        for (const auto& pattern : spec.patterns) {
            out += pattern;
            out += '\n';
        }
    }
    return out;
}

Expected<std::vector<std::string>, RulesError> parse_files_list(std::string_view text)
{
    std::vector<std::string> paths;
    std::set<std::string, std::less<>> seen;
    for (const Line& line : split_lines(text)) {
        if (line.text.find('\0') != std::string_view::npos)
            return unexpected(make_error(RulesErrc::InvalidCharacter, line.number, "NUL byte"));
        if (!seen.emplace(line.text).second)
            return unexpected(make_error(RulesErrc::DuplicatePath, line.number, std::string(line.text)));
        paths.emplace_back(line.text);
    }
    if (paths.empty())
        return unexpected(make_error(RulesErrc::EmptyList, 0, "no paths listed"));
    std::sort(paths.begin(), paths.end());
    return paths;
}

bool glob_match(std::string_view pattern, std::string_view candidate)
{
    // active[i]: the prefix pattern[0, i) can match the consumed candidate prefix.
    const std::size_t states = pattern.size() + 1;
    std::vector<char> active(states, 0);
    std::vector<char> next(states, 0);

    auto close_over_stars = [&](std::vector<char>& set) {
        for (std::size_t i = 0; i < pattern.size(); ++i) {
            if (set[i] && pattern[i] == '*')
                set[i + 1] = 1;
        }
    };

    active[0] = 1;
    close_over_stars(active);
    for (char c : candidate) {
        std::fill(next.begin(), next.end(), 0);
        bool any = false;
        for (std::size_t i = 0; i < pattern.size(); ++i) {
            if (!active[i])
                continue;
            const char p = pattern[i];
            if (p == '*') {
                if (is_valid_name_char(c)) {
                    next[i] = 1;
                    any = true;
                }
            } else if (p == '?' ? is_valid_name_char(c) : p == c) {
                next[i + 1] = 1;
                any = true;
            }
        }
        if (!any)
            return false;
        close_over_stars(next);
        active.swap(next);
    }
    return active[pattern.size()] != 0;
}

}  // namespace snapshot
