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
#include <map>
#include <optional>

#include "rvchain/bytes.hpp"
#include "rvchain/crypto.hpp"

namespace rvchain {

inline constexpr std::size_t kSealNonceSize = 12;
inline constexpr std::size_t kSealTagSize = 16;

using SealNonce = std::array<std::uint8_t, kSealNonceSize>;
using SealTag = std::array<std::uint8_t, kSealTagSize>;

class AuthFailure : public Error {
public:
    using Error::Error;
};

// A key_id mismatch is also an authentication failure: a sealed payload
// whose key_id was altered must never decrypt.
class UnknownKey : public AuthFailure {
public:
    using AuthFailure::AuthFailure;
};

class NonceExhausted : public Error {
public:
    using Error::Error;
};

/// Stand-in for a processor-held sealing key. Deliberately has no encoding.
struct SealKey {
    MacKey key_bytes{};
    std::uint32_t key_id = 0;
};

SealKey generate_seal_key(DeterministicStream& rng, std::uint32_t key_id);

struct SealedPayload {
    std::uint32_t key_id = 0;
    SealNonce nonce{};
    Bytes ciphertext;
    SealTag auth_tag{};

    bool operator==(const SealedPayload&) const = default;
};

// key_id (u32 BE) || nonce (12B) || ciphertext_len (u64 BE) || ciphertext || auth_tag (16B)
Bytes encode_sealed_payload(const SealedPayload& sealed);
SealedPayload decode_sealed_payload(ByteView bytes);

/// Owns a key together with its nonce counter.
///
/// Nonces are the counter value (u64 BE) behind four zero bytes, so they never
/// repeat for one Sealer. Not thread-safe; confine each Sealer to one owner.
class Sealer {
public:
    explicit Sealer(SealKey key, std::uint64_t nonce_budget = UINT64_MAX);

    // ChaCha20-Poly1305 (IETF) over plaintext, authenticating key_id || associated_data.
    SealedPayload seal(ByteView plaintext, ByteView associated_data);

    const SealKey& key() const { return key_; }
    std::uint64_t seals_issued() const { return next_nonce_; }

private:
    SealKey key_;
    std::uint64_t nonce_budget_;
    std::uint64_t next_nonce_ = 0;
};

Bytes unseal(const SealKey& key, const SealedPayload& sealed, ByteView associated_data);

/// Static directory of sealing keys shared by honest verifiers.
class KeyDirectory {
public:
    void add(const SealKey& key);
    const SealKey* find(std::uint32_t key_id) const;
    Bytes unseal(const SealedPayload& sealed, ByteView associated_data) const;
    std::size_t size() const { return keys_.size(); }

private:
    std::map<std::uint32_t, SealKey> keys_;
};

}  // namespace rvchain
