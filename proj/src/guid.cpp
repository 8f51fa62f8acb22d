#include "snapshot/guid.hpp"

#include <algorithm>

namespace snapshot {

namespace {

int hex_value(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

// Text position of each on-disk byte. Data1..Data3 are little-endian, so
// their bytes appear reversed in the text form.
constexpr std::array<int, 16> kTextByteIndex = {
    6, 4, 2, 0,        // Data1
    11, 9,             // Data2
    16, 14,            // Data3
    19, 21,            // Data4[0..1]
    24, 26, 28, 30, 32, 34,
};

}  // namespace

bool Guid::is_zero() const noexcept
{
    return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

std::optional<Guid> Guid::parse(std::string_view text)
{
    if (text.size() != 36)
        return std::nullopt;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const bool hyphen_slot = i == 8 || i == 13 || i == 18 || i == 23;
        if (hyphen_slot != (text[i] == '-'))
            return std::nullopt;
        if (!hyphen_slot && hex_value(text[i]) < 0)
            return std::nullopt;
    }
    Guid guid;
    for (std::size_t i = 0; i < 16; ++i) {
        const auto pos = static_cast<std::size_t>(kTextByteIndex[i]);
        guid.bytes[i] = static_cast<std::uint8_t>(hex_value(text[pos]) << 4 | hex_value(text[pos + 1]));
    }
    return guid;
}

std::string Guid::to_string() const
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(36, '-');
    for (std::size_t i = 0; i < 16; ++i) {
        const auto pos = static_cast<std::size_t>(kTextByteIndex[i]);
        out[pos] = kDigits[bytes[i] >> 4];
        out[pos + 1] = kDigits[bytes[i] & 0x0F];
    }
    return out;
}

}  // namespace snapshot
