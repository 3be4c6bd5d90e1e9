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

#include "rvchain/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

namespace rvchain {

namespace {
struct SodiumInit {
    SodiumInit() {
        if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
    }
};

void ensure_sodium() { static SodiumInit init; }
}  // namespace

Hash32 sha256(ByteView data) {
    ensure_sodium();
    Hash32 out{};
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

Hash32 hmac_sha256(const MacKey& key, ByteView message) {
    ensure_sodium();
    Hash32 out{};
    crypto_auth_hmacsha256(out.data(), message.data(), message.size(), key.data());
    return out;
}

bool hmac_sha256_verify(const MacKey& key, ByteView message, const Hash32& tag) {
    ensure_sodium();
    return crypto_auth_hmacsha256_verify(tag.data(), message.data(), message.size(), key.data()) == 0;
}

DeterministicStream::DeterministicStream(std::string_view domain, std::uint64_t seed, std::uint64_t subkey) {
    ByteWriter w;
    w.raw(ByteView(reinterpret_cast<const std::uint8_t*>(domain.data()), domain.size()));
    w.u8(0);
    w.u64(seed);
    w.u64(subkey);
    prefix_ = std::move(w).take();
}

void DeterministicStream::refill() {
    Bytes input = prefix_;
    ByteWriter w;
    w.u64(counter_++);
    input.insert(input.end(), w.bytes().begin(), w.bytes().end());
    auto block = sha256(input);
    ByteReader r(block);
    for (auto& word : words_) word = r.u64();
    next_word_ = 0;
}

std::uint64_t DeterministicStream::next_u64() {
    if (next_word_ == words_.size()) refill();
    return words_[next_word_++];
}

std::uint64_t DeterministicStream::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("below(0)");
    // 2^64 mod bound; words at or above 2^64 - r would bias the modulus.
    const std::uint64_t r = (0 - bound) % bound;
    for (;;) {
        std::uint64_t w = next_u64();
        if (r == 0 || w < 0 - r) return w % bound;
    }
}

std::uint64_t DeterministicStream::between(std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) throw std::invalid_argument("between: hi < lo");
    if (lo == 0 && hi == UINT64_MAX) return next_u64();
    return lo + below(hi - lo + 1);
}

double DeterministicStream::unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool DeterministicStream::bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return unit() < p;
}

MacKey DeterministicStream::key32() {
    MacKey key{};
    for (std::size_t i = 0; i < 4; ++i) {
        std::uint64_t w = next_u64();
        for (std::size_t b = 0; b < 8; ++b) key[i * 8 + b] = static_cast<std::uint8_t>(w >> (56 - 8 * b));
    }
    return key;
}

}  // namespace rvchain
