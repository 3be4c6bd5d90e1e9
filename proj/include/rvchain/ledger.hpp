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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rvchain/bytes.hpp"
#include "rvchain/crypto.hpp"
#include "rvchain/sealing.hpp"

namespace rvchain {

using ChainId = std::uint32_t;
using Rank = std::uint64_t;

inline constexpr Hash32 kZeroHash{};

class LinkageError : public Error {
public:
    using Error::Error;
};

class RankError : public Error {
public:
    using Error::Error;
};

class ChainMismatch : public Error {
public:
    using Error::Error;
};

class InvalidTransaction : public Error {
public:
    using Error::Error;
};

struct TransactionId {
    Hash32 digest{};
    auto operator<=>(const TransactionId&) const = default;
};

/// A client transaction. When `sensitive` is set the payload holds an encoded
/// SealedPayload rather than plaintext. `fee` is carried but never interpreted.
struct Transaction {
    Bytes payload;
    bool sensitive = false;
    std::uint64_t fee = 0;
    std::uint64_t nonce = 0;

    bool operator==(const Transaction&) const = default;
};

// payload (u64 len || bytes) || sensitive (u8) || fee (u64) || nonce (u64)
Bytes encode_transaction(const Transaction& tx);
TransactionId transaction_id(const Transaction& tx);

/// Associated data bound into a sensitive transaction's seal: every field
/// except the payload, so the ciphertext cannot be moved to another transaction.
Bytes transaction_associated_data(bool sensitive, std::uint64_t fee, std::uint64_t nonce);

Transaction make_sensitive_transaction(Sealer& sealer, ByteView plaintext, std::uint64_t fee, std::uint64_t nonce);
Bytes open_sensitive_transaction(const KeyDirectory& keys, const Transaction& tx);

// Throws InvalidTransaction if a sensitive payload does not parse as a SealedPayload.
void validate_transaction(const Transaction& tx);

struct BlockHeader {
    ChainId chain_id = 0;
    std::uint64_t height = 0;
    Hash32 parent_hash{};
    Rank rank = 0;
    Rank next_rank = 0;
    Hash32 tx_root{};
    std::uint64_t proposer_term = 0;

    bool operator==(const BlockHeader&) const = default;
};

inline constexpr std::size_t kHeaderEncodedSize = 4 + 8 + 32 + 8 + 8 + 32 + 8;

// chain_id (u32) || height (u64) || parent_hash || rank (u64) || next_rank (u64) || tx_root || proposer_term (u64)
Bytes encode_header(const BlockHeader& header);
Hash32 hash_header(const BlockHeader& header);

// SHA-256 of count (u64) followed by each canonical transaction encoding.
Hash32 compute_tx_root(std::span<const Transaction> txs);

struct Block {
    BlockHeader header;
    std::vector<Transaction> transactions;

    bool operator==(const Block&) const = default;
};

/// Genesis of a chain: height 0, rank 0, next_rank 1, no transactions.
Block make_genesis(ChainId chain_id);

/// Builds the block that extends `parent` with the given rank fields.
Block make_child_block(const BlockHeader& parent, Rank rank, Rank next_rank, std::uint64_t term,
                       std::vector<Transaction> txs);

Bytes encode_block(const Block& block);
Block decode_block(ByteView bytes);
// Reads only the header prefix of an encode_block output.
BlockHeader decode_block_header(ByteView encoded_block);

enum class TxRootCheck { Verify, Skip };

/// Checks that `block` may follow `parent` on chain `chain_id` (parent == nullptr
/// means `block` must be a genesis). Throws ChainMismatch, LinkageError or RankError.
/// TxRootCheck::Skip is for header-only reconstructions.
void check_successor(ChainId chain_id, const BlockHeader* parent, const Block& block,
                     TxRootCheck tx_root = TxRootCheck::Verify);

/// Append-only committed history of one shadow chain.
class ChainLedger {
public:
    explicit ChainLedger(ChainId chain_id) : chain_id_(chain_id) {}

    ChainId chain_id() const { return chain_id_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    std::size_t size() const { return blocks_.size(); }
    bool empty() const { return blocks_.empty(); }
    const Block& back() const { return blocks_.back(); }

    // Throws ChainMismatch, LinkageError or RankError; the ledger is unchanged on error.
    void append(Block block);

    /// Validation without mutation; same errors as append.
    void check_append(const Block& block) const;

private:
    ChainId chain_id_;
    std::vector<Block> blocks_;
};

ChainLedger append_block(ChainLedger ledger, Block block);

// One line per block: hex of encode_block.
void write_ledger_file(const std::filesystem::path& path, const ChainLedger& ledger);
ChainLedger read_ledger_file(const std::filesystem::path& path, ChainId chain_id);

}  // namespace rvchain
