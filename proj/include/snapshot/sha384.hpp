#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace snapshot {

inline constexpr std::size_t kSha384DigestSize = 48;
inline constexpr std::size_t kSha384BlockSize = 128;

using Digest = std::array<std::uint8_t, kSha384DigestSize>;

/// Streaming SHA-384 (FIPS 180-4). Portable scalar implementation.
class Sha384 {
public:
    Sha384() noexcept;

    void update(std::span<const std::uint8_t> data) noexcept;
    void update(std::string_view data) noexcept;

    /// Applies padding and returns the digest. The object must be reset()
    /// before it is reused.
    Digest finalize() noexcept;

    void reset() noexcept;

    /// Number of compression-function invocations so far, padding blocks
    /// included. Used to observe the extra block at the 112-byte boundary.
    [[nodiscard]] std::uint64_t compressions() const noexcept { return compressions_; }

private:
    void compress(const std::uint8_t* block) noexcept;

    std::array<std::uint64_t, 8> state_{};
    std::array<std::uint8_t, kSha384BlockSize> buffer_{};
    std::size_t buffered_ = 0;
    // 128-bit message length in bytes, split into two words.
    std::uint64_t length_low_ = 0;
    std::uint64_t length_high_ = 0;
    std::uint64_t compressions_ = 0;
};

Digest sha384(std::span<const std::uint8_t> message) noexcept;
Digest sha384(std::string_view message) noexcept;

/// Smallest k >= 0 with (bit_length + 1 + k) mod 1024 == 896.
std::uint64_t padding_zero_count(std::uint64_t bit_length) noexcept;

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace snapshot
