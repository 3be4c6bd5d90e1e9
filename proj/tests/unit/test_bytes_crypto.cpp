// Copyright 2026 The RVChain Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "rvchain/bytes.hpp"
#include "rvchain/crypto.hpp"

namespace rvchain {
namespace {

// Frozen values come from tests/oracles/reference_values.py.

Bytes ascii(std::string_view s) { return Bytes(s.begin(), s.end()); }

MacKey counting_key() {
    MacKey k{};
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<std::uint8_t>(i);
    return k;
}

TEST(Hex, RoundTrip) {
    Bytes b{0x00, 0x7f, 0xff, 0x10};
    EXPECT_EQ(to_hex(b), "007fff10");
    EXPECT_EQ(from_hex("007fff10"), b);
    EXPECT_EQ(from_hex("007FFF10"), b);
}

TEST(Hex, RejectsMalformed) {
    EXPECT_THROW(from_hex("abc"), DecodeError);
    EXPECT_THROW(from_hex("zz"), DecodeError);
}

TEST(ByteReader, ReadsBigEndianFields) {
    ByteWriter w;
    w.u8(0xab);
    w.u32(0x01020304);
    w.u64(0x0102030405060708ull);
    w.blob(ascii("hi"));
    Bytes b = std::move(w).take();
    EXPECT_EQ(to_hex(b), "ab010203040102030405060708" "0000000000000002" "6869");
    ByteReader r(b);
    EXPECT_EQ(r.u8(), 0xab);
    EXPECT_EQ(r.u32(), 0x01020304u);
    EXPECT_EQ(r.u64(), 0x0102030405060708ull);
    EXPECT_EQ(r.blob(), ascii("hi"));
    EXPECT_NO_THROW(r.expect_end());
}

TEST(ByteReader, TruncationAndTrailingBytesAreErrors) {
    Bytes b{0, 0, 0};
    ByteReader r(b);
    EXPECT_THROW(r.u32(), DecodeError);
    ByteReader r2(b);
    r2.u8();
    EXPECT_THROW(r2.expect_end(), DecodeError);
    Bytes huge_blob{0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 1};
    ByteReader r3(huge_blob);
    EXPECT_THROW(r3.blob(), DecodeError);
}

TEST(SharedBytes, EqualityByContent) {
    SharedBytes a(Bytes{1, 2, 3});
    SharedBytes b(Bytes{1, 2, 3});
    SharedBytes c = a;
    EXPECT_TRUE(a == b);
    EXPECT_TRUE(a == c);
    EXPECT_TRUE(a.shares_storage_with(c));
    EXPECT_FALSE(a.shares_storage_with(b));
    EXPECT_FALSE(a == SharedBytes(Bytes{1, 2}));
}

TEST(Sha256, MatchesReferenceVectors) {
    EXPECT_EQ(to_hex(sha256(Bytes(100, 0))), "cd00e292c5970d3c5e2f0ffa5171e555bc46bfc4faddfb4a418b6840b86e79a3");
    EXPECT_EQ(to_hex(sha256(ascii("abc"))), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hmac, MatchesReferenceAndVerifies) {
    auto tag = hmac_sha256(counting_key(), ascii("rvchain"));
    EXPECT_EQ(to_hex(tag), "c3709533cd690d86051c997986345c9cd495cdd682504b823d5f1511bbc1fa8d");
    EXPECT_TRUE(hmac_sha256_verify(counting_key(), ascii("rvchain"), tag));
    tag[0] ^= 1;
    EXPECT_FALSE(hmac_sha256_verify(counting_key(), ascii("rvchain"), tag));
}

TEST(DeterministicStream, MatchesReferenceWords) {
    DeterministicStream s("rvchain/shuffle", 12345);
    EXPECT_EQ(s.next_u64(), 0x9fee265f3a187a8cull);
    EXPECT_EQ(s.next_u64(), 0x9d5939b63a66cadaull);
    EXPECT_EQ(s.next_u64(), 0x78c0540666f9144cull);
    EXPECT_EQ(s.next_u64(), 0x9bbe69083fb2a4c2ull);
    EXPECT_EQ(s.next_u64(), 0xe98e3f6446f73934ull);
    EXPECT_EQ(s.blocks_consumed(), 2u);

    DeterministicStream keys("rvchain/beacon-keys", 1);
    EXPECT_EQ(keys.next_u64(), 0x7105c5324e55ca6cull);
    EXPECT_EQ(keys.next_u64(), 0xa5202d7e34793f06ull);
}

TEST(DeterministicStream, NamedStreamsAreIndependent) {
    DeterministicStream a("rvchain/a", 1);
    DeterministicStream b("rvchain/b", 1);
    DeterministicStream c("rvchain/a", 1, 1);
    DeterministicStream d("rvchain/a", 2);
    auto first = a.next_u64();
    EXPECT_NE(first, b.next_u64());
    EXPECT_NE(first, c.next_u64());
    EXPECT_NE(first, d.next_u64());
}

TEST(DeterministicStream, BoundedDrawsStayInRange) {
    DeterministicStream s("rvchain/test", 9);
    for (int i = 0; i < 10000; ++i) {
        EXPECT_LT(s.below(7), 7u);
        auto v = s.between(3, 5);
        EXPECT_GE(v, 3u);
        EXPECT_LE(v, 5u);
        double u = s.unit();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
    EXPECT_FALSE(s.bernoulli(0.0));
    EXPECT_TRUE(s.bernoulli(1.0));
}

TEST(DeterministicStream, BelowIsRoughlyUniform) {
    DeterministicStream s("rvchain/test", 10);
    std::array<int, 6> counts{};
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) counts[s.below(6)]++;
    for (int c : counts) EXPECT_NEAR(c, draws / 6, 500);  // about 5 standard deviations
}

}  // namespace
}  // namespace rvchain
