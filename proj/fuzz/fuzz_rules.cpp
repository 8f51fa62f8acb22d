// Coverage-guided target for the rules-file parser and the glob matcher.

#include <cstdint>
#include <cstdlib>
#include <string_view>

#include "snapshot/rules.hpp"

extern "C" int LLVMFuzzerTestOneInput(const std::uint8_t* data, std::size_t size)
{
    using namespace snapshot;
    const std::string_view text(reinterpret_cast<const char*>(data), size);

    if (auto specs = parse_rules_file(text)) {
        auto again = parse_rules_file(format_rules_file(*specs));
        if (!again || *again != *specs)
            std::abort();
    }
    (void)parse_files_list(text);

    // First line is a pattern, the rest a candidate.
    const std::size_t split = text.find('\n');
    if (split != std::string_view::npos)
        (void)glob_match(text.substr(0, split), text.substr(split + 1));
    return 0;
}
