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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "rvchain/bytes.hpp"

namespace rvchain {

using MacKey = std::array<std::uint8_t, 32>;

Hash32 sha256(ByteView data);
Hash32 hmac_sha256(const MacKey& key, ByteView message);
// Constant-time tag comparison.
bool hmac_sha256_verify(const MacKey& key, ByteView message, const Hash32& tag);

/// Deterministic counter-mode random stream.
///
/// Block k is SHA-256(domain || 0x00 || seed (u64 BE) || subkey (u64 BE) || k (u64 BE));
/// each block yields four u64 words read big-endian in order. Streams with
/// different (domain, seed, subkey) are independent, so one master seed can be
/// split into named streams without one knob perturbing another.
class DeterministicStream {
public:
    DeterministicStream(std::string_view domain, std::uint64_t seed, std::uint64_t subkey = 0);

    std::uint64_t next_u64();

    /// Uniform draw from [0, bound) by rejection sampling. bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform draw from [lo, hi] (inclusive).
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi);

    /// True with probability p (53-bit resolution).
    bool bernoulli(double p);

    /// Uniform double in [0, 1).
    double unit();

    MacKey key32();

    std::uint64_t blocks_consumed() const { return counter_; }

private:
    void refill();

    Bytes prefix_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 4> words_{};
    std::size_t next_word_ = 4;
};

}  // namespace rvchain
