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

#include "rvchain/sealing.hpp"

#include <sodium.h>

#include <string>

namespace rvchain {

static_assert(crypto_aead_chacha20poly1305_ietf_NPUBBYTES == kSealNonceSize);
static_assert(crypto_aead_chacha20poly1305_ietf_ABYTES == kSealTagSize);
static_assert(crypto_aead_chacha20poly1305_ietf_KEYBYTES == 32);

namespace {
Bytes bound_associated_data(std::uint32_t key_id, ByteView associated_data) {
    ByteWriter w;
    w.u32(key_id);
    w.raw(associated_data);
    return std::move(w).take();
}
}  // namespace

SealKey generate_seal_key(DeterministicStream& rng, std::uint32_t key_id) {
    return SealKey{rng.key32(), key_id};
}

Bytes encode_sealed_payload(const SealedPayload& sealed) {
    ByteWriter w;
    w.u32(sealed.key_id);
    w.raw(sealed.nonce);
    w.blob(sealed.ciphertext);
    w.raw(sealed.auth_tag);
    return std::move(w).take();
}

SealedPayload decode_sealed_payload(ByteView bytes) {
    ByteReader r(bytes);
    SealedPayload out;
    out.key_id = r.u32();
    out.nonce = r.fixed<kSealNonceSize>();
    out.ciphertext = r.blob();
    out.auth_tag = r.fixed<kSealTagSize>();
    r.expect_end();
    return out;
}

Sealer::Sealer(SealKey key, std::uint64_t nonce_budget) : key_(key), nonce_budget_(nonce_budget) {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
}

SealedPayload Sealer::seal(ByteView plaintext, ByteView associated_data) {
    if (next_nonce_ >= nonce_budget_) {
        throw NonceExhausted("nonce budget exhausted for key " + std::to_string(key_.key_id));
    }
    SealedPayload out;
    out.key_id = key_.key_id;
    std::uint64_t counter = next_nonce_++;
    for (std::size_t i = 0; i < 8; ++i) out.nonce[4 + i] = static_cast<std::uint8_t>(counter >> (56 - 8 * i));

    auto ad = bound_associated_data(key_.key_id, associated_data);
    out.ciphertext.resize(plaintext.size());
    unsigned long long tag_len = 0;
    crypto_aead_chacha20poly1305_ietf_encrypt_detached(
        out.ciphertext.data(), out.auth_tag.data(), &tag_len, plaintext.data(), plaintext.size(), ad.data(),
        ad.size(), nullptr, out.nonce.data(), key_.key_bytes.data());
    return out;
}

Bytes unseal(const SealKey& key, const SealedPayload& sealed, ByteView associated_data) {
    if (sealed.key_id != key.key_id) {
        throw UnknownKey("sealed payload names key " + std::to_string(sealed.key_id) + ", have key " +
                         std::to_string(key.key_id));
    }
    auto ad = bound_associated_data(sealed.key_id, associated_data);
    Bytes plaintext(sealed.ciphertext.size());
    int rc = crypto_aead_chacha20poly1305_ietf_decrypt_detached(
        plaintext.data(), nullptr, sealed.ciphertext.data(), sealed.ciphertext.size(), sealed.auth_tag.data(),
        ad.data(), ad.size(), sealed.nonce.data(), key.key_bytes.data());
    if (rc != 0) throw AuthFailure("sealed payload failed authentication");
    return plaintext;
}

void KeyDirectory::add(const SealKey& key) { keys_[key.key_id] = key; }

const SealKey* KeyDirectory::find(std::uint32_t key_id) const {
    auto it = keys_.find(key_id);
    return it == keys_.end() ? nullptr : &it->second;
}

Bytes KeyDirectory::unseal(const SealedPayload& sealed, ByteView associated_data) const {
    const SealKey* key = find(sealed.key_id);
    if (key == nullptr) throw UnknownKey("no key with id " + std::to_string(sealed.key_id));
    return rvchain::unseal(*key, sealed, associated_data);
}

}  // namespace rvchain
