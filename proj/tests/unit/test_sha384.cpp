#include <doctest.h>

#include <openssl/sha.h>

#include <random>
#include <string>
#include <vector>

#include "snapshot/sha384.hpp"

using namespace snapshot;

namespace {

// Independent implementation used as the oracle.
Digest openssl_sha384(std::span<const std::uint8_t> message)
{
    Digest out;
    SHA384(message.data(), message.size(), out.data());
    return out;
}

std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, std::size_t size)
{
    std::vector<std::uint8_t> out(size);
    for (auto& byte : out)
        byte = static_cast<std::uint8_t>(rng());
    return out;
}

std::uint64_t compressions_for(std::size_t length)
{
    Sha384 hasher;
    hasher.update(std::vector<std::uint8_t>(length, 0x61));
    hasher.finalize();
    return hasher.compressions();
}

}  // namespace

TEST_SUITE("sha384")
{
    TEST_CASE("standard vectors")
    {
        CHECK(to_hex(sha384("")) ==
              "38b060a751ac96384cd9327eb1b1e36a21fdb71114be07434c0cc7bf63f6e1da274edebfe76f65fbd51ad2f14898b95b");
        CHECK(to_hex(sha384("abc")) ==
              "cb00753f45a35e8bb5a03d699ac65007272c32ab0eded1631a8b605a43ff5bed8086072ba1e7cc2358baeca134c825a7");
        CHECK(to_hex(sha384("abcdefghbcdefghicdefghijdefghijkefghijklfghijklmghijklmnhijklmnoijklmnopjklmnopqklmnopqr"
                            "lmnopqrsmnopqrstnopqrstu")) ==
              "09330c33f71147e83d192fc782cd1b4753111b173b3b05d22fa08086e3b0f712fcc7c71a557e2db966c3e9fa91746039");
        CHECK(to_hex(sha384(std::string(1000000, 'a'))) ==
              "9d0e1809716474cb086e834e310a4a1ced149e9c00f248527972cec5704c2a5b07b8b3dc38ecc4ebae97ddd87f3d8985");
    }

    TEST_CASE("896 zero bits")
    {
        const std::vector<std::uint8_t> zeros(112, 0);
        CHECK(sha384(zeros) == openssl_sha384(zeros));
        CHECK(to_hex(sha384(zeros)) ==
              "3e0cbf3aee0e3aa70415beae1bd12dd7db821efa446440f12132edffce76f635e53526a111491e75ee8e27b9700eec20");
    }

    TEST_CASE("every length across several block boundaries matches the oracle")
    {
        std::mt19937_64 rng(1);
        for (std::size_t length = 0; length <= 600; ++length) {
            const auto message = random_bytes(rng, length);
            REQUIRE_MESSAGE(sha384(message) == openssl_sha384(message), "length " << length);
        }
    }

    TEST_CASE("chunked updates equal one-shot hashing")
    {
        std::mt19937_64 rng(2);
        for (int trial = 0; trial < 1000; ++trial) {
            const auto message = random_bytes(rng, rng() % 2048);
            const Digest expected = openssl_sha384(message);
            REQUIRE(sha384(message) == expected);

            Sha384 hasher;
            std::size_t at = 0;
            while (at < message.size()) {
                const std::size_t chunk = std::min<std::size_t>(rng() % 300, message.size() - at);
                hasher.update(std::span(message).subspan(at, chunk));
                at += chunk;
            }
            REQUIRE(hasher.finalize() == expected);
        }
    }

    TEST_CASE("reset and reuse")
    {
        Sha384 hasher;
        hasher.update("garbage");
        hasher.reset();
        hasher.update("abc");
        CHECK(hasher.finalize() == sha384("abc"));
        hasher.reset();
        CHECK(hasher.finalize() == sha384(""));
    }

    TEST_CASE("padding zero count")
    {
        CHECK(padding_zero_count(896) == 1023);
        CHECK(padding_zero_count(832) == 63);
        CHECK(padding_zero_count(0) == 895);
        for (std::uint64_t l = 0; l <= 8192; ++l) {
            const std::uint64_t k = padding_zero_count(l);
            REQUIRE(k < 1024);
            REQUIRE((l + 1 + k + 128) % 1024 == 0);
        }
    }

    TEST_CASE("compression count steps at 112 bytes")
    {
        CHECK(compressions_for(104) == 1);
        CHECK(compressions_for(111) == 1);
        CHECK(compressions_for(112) == 2);
        CHECK(compressions_for(112) == compressions_for(104) + 1);
        for (std::size_t length = 0; length < 1024; ++length) {
            const std::uint64_t padded_bits = length * 8 + 1 + padding_zero_count(length * 8) + 128;
            REQUIRE(compressions_for(length) == padded_bits / 1024);
        }
    }

    TEST_CASE("hex encoding")
    {
        const std::vector<std::uint8_t> bytes{0x00, 0x0f, 0xa0, 0xff};
        CHECK(to_hex(bytes) == "000fa0ff");
        CHECK(to_hex({}).empty());
    }
}
