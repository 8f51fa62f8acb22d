#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace snapshot {

/// EFI_GUID in its on-disk byte order: Data1 (u32 LE), Data2 (u16 LE),
/// Data3 (u16 LE), Data4 (8 raw bytes).
struct Guid {
    std::array<std::uint8_t, 16> bytes{};

    [[nodiscard]] bool is_zero() const noexcept;

    /// Accepts only the canonical 36-character hyphenated form; hex digits
    /// may be either case.
    static std::optional<Guid> parse(std::string_view text);

    /// Lowercase canonical text form.
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Guid&, const Guid&) = default;
    friend auto operator<=>(const Guid&, const Guid&) = default;
};

}  // namespace snapshot
