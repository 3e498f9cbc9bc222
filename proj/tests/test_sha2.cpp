#include "dltrng/sha2.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <string>
#include <vector>

using namespace dltrng;

namespace {

std::string hex256(const std::string& msg) {
    return sha256_hex(msg);
}

std::string hex512(const std::vector<std::uint8_t>& msg) {
    const auto d = Sha512::digest(msg.data(), msg.size());
    return hex_string(d.data(), d.size());
}

}  // namespace

// FIPS 180-4 known-answer vectors.
TEST(Sha256, StandardVectors) {
    EXPECT_EQ(hex256(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(hex256("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(hex256("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"),
              "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST(Sha256, ExactlyOneHashBlockOfInput) {
    // 64 bytes = one 512-bit conditioning block.
    std::vector<std::uint8_t> block(64);
    std::iota(block.begin(), block.end(), std::uint8_t(0));
    const auto d = Sha256::digest(block.data(), block.size());
    EXPECT_EQ(hex_string(d.data(), d.size()),
              "fdeab9acf3710362bd2658cdc9a29e8f9c757fcf9811603a8c447cd1d9151108");
}

TEST(Sha256, MillionCharStreaming) {
    Sha256 h;
    const std::string chunk(997, 'a');  // deliberately not block aligned
    std::size_t written = 0;
    while (written < 1000000) {
        const std::size_t take = std::min<std::size_t>(chunk.size(), 1000000 - written);
        h.update(reinterpret_cast<const std::uint8_t*>(chunk.data()), take);
        written += take;
    }
    const auto d = h.finish();
    EXPECT_EQ(hex_string(d.data(), d.size()),
              "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST(Sha256, IncrementalMatchesOneShot) {
    std::mt19937_64 rng(3);
    std::vector<std::uint8_t> msg(5000);
    for (auto& b : msg)
        b = std::uint8_t(rng());
    const auto oneshot = Sha256::digest(msg.data(), msg.size());
    Sha256 h;
    std::size_t pos = 0;
    while (pos < msg.size()) {
        const std::size_t take = std::min<std::size_t>(1 + rng() % 257, msg.size() - pos);
        h.update(msg.data() + pos, take);
        pos += take;
    }
    EXPECT_EQ(h.finish(), oneshot);
}

TEST(Sha512, StandardVectors) {
    EXPECT_EQ(hex512({}),
              "cf83e1357eefb8bdf1542850d66d8007d620e4050b5715dc83f4a921d36ce9ce"
              "47d0d13c5d85f2b0ff8318d2877eec2f63b931bd47417a81a538327af927da3e");
    const std::string abc = "abc";
    const auto d = Sha512::digest(reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size());
    EXPECT_EQ(hex_string(d.data(), d.size()),
              "ddaf35a193617abacc417349ae20413112e6fa4e89a97ea20a9eeee64b55d39a"
              "2192992a274fc1a836ba3c23a3feebbd454d4423643ce80e2a9ac94fa54ca49f");
}

TEST(Sha512, ExactlyOneHashBlockOfInput) {
    // 128 bytes = one 1024-bit conditioning block.
    std::vector<std::uint8_t> block(128);
    std::iota(block.begin(), block.end(), std::uint8_t(0));
    EXPECT_EQ(hex512(block),
              "1dffd5e3adb71d45d2245939665521ae001a317a03720a45732ba1900ca3b835"
              "1fc5c9b4ca513eba6f80bc7b1d1fdad4abd13491cb824d61b08d8c0e1561b3f7");
}
