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

#include "rvchain/ledger.hpp"

#include <fstream>
#include <string>

namespace rvchain {

namespace {

void write_transaction(ByteWriter& w, const Transaction& tx) {
    w.blob(tx.payload);
    w.u8(tx.sensitive ? 1 : 0);
    w.u64(tx.fee);
    w.u64(tx.nonce);
}

Transaction read_transaction(ByteReader& r) {
    Transaction tx;
    tx.payload = r.blob();
    auto flag = r.u8();
    if (flag > 1) throw DecodeError("sensitive flag must be 0 or 1");
    tx.sensitive = flag == 1;
    tx.fee = r.u64();
    tx.nonce = r.u64();
    return tx;
}

void write_header(ByteWriter& w, const BlockHeader& h) {
    w.u32(h.chain_id);
    w.u64(h.height);
    w.raw(h.parent_hash);
    w.u64(h.rank);
    w.u64(h.next_rank);
    w.raw(h.tx_root);
    w.u64(h.proposer_term);
}

BlockHeader read_header(ByteReader& r) {
    BlockHeader h;
    h.chain_id = r.u32();
    h.height = r.u64();
    h.parent_hash = r.fixed<32>();
    h.rank = r.u64();
    h.next_rank = r.u64();
    h.tx_root = r.fixed<32>();
    h.proposer_term = r.u64();
    return h;
}

}  // namespace

Bytes encode_transaction(const Transaction& tx) {
    ByteWriter w;
    write_transaction(w, tx);
    return std::move(w).take();
}

TransactionId transaction_id(const Transaction& tx) { return TransactionId{sha256(encode_transaction(tx))}; }

Bytes transaction_associated_data(bool sensitive, std::uint64_t fee, std::uint64_t nonce) {
    static constexpr std::string_view kDomain = "rvchain/tx";
    ByteWriter w;
    w.raw(ByteView(reinterpret_cast<const std::uint8_t*>(kDomain.data()), kDomain.size()));
    w.u8(sensitive ? 1 : 0);
    w.u64(fee);
    w.u64(nonce);
    return std::move(w).take();
}

Transaction make_sensitive_transaction(Sealer& sealer, ByteView plaintext, std::uint64_t fee, std::uint64_t nonce) {
    auto sealed = sealer.seal(plaintext, transaction_associated_data(true, fee, nonce));
    return Transaction{encode_sealed_payload(sealed), true, fee, nonce};
}

Bytes open_sensitive_transaction(const KeyDirectory& keys, const Transaction& tx) {
    if (!tx.sensitive) throw InvalidTransaction("transaction is not sensitive");
    auto sealed = decode_sealed_payload(tx.payload);
    return keys.unseal(sealed, transaction_associated_data(true, tx.fee, tx.nonce));
}

void validate_transaction(const Transaction& tx) {
    if (!tx.sensitive) return;
    try {
        (void)decode_sealed_payload(tx.payload);
    } catch (const DecodeError& e) {
        throw InvalidTransaction(std::string("sensitive payload is not a sealed payload: ") + e.what());
    }
}

Bytes encode_header(const BlockHeader& header) {
    ByteWriter w;
    write_header(w, header);
    return std::move(w).take();
}

Hash32 hash_header(const BlockHeader& header) { return sha256(encode_header(header)); }

Hash32 compute_tx_root(std::span<const Transaction> txs) {
    ByteWriter w;
    w.u64(txs.size());
    for (const auto& tx : txs) write_transaction(w, tx);
    return sha256(w.bytes());
}

Block make_genesis(ChainId chain_id) {
    Block b;
    b.header.chain_id = chain_id;
    b.header.rank = 0;
    b.header.next_rank = 1;
    b.header.tx_root = compute_tx_root({});
    return b;
}

Block make_child_block(const BlockHeader& parent, Rank rank, Rank next_rank, std::uint64_t term,
                       std::vector<Transaction> txs) {
    Block b;
    b.header.chain_id = parent.chain_id;
    b.header.height = parent.height + 1;
    b.header.parent_hash = hash_header(parent);
    b.header.rank = rank;
    b.header.next_rank = next_rank;
    b.header.tx_root = compute_tx_root(txs);
    b.header.proposer_term = term;
    b.transactions = std::move(txs);
    return b;
}

Bytes encode_block(const Block& block) {
    ByteWriter w;
    write_header(w, block.header);
    w.u64(block.transactions.size());
    for (const auto& tx : block.transactions) write_transaction(w, tx);
    return std::move(w).take();
}

Block decode_block(ByteView bytes) {
    ByteReader r(bytes);
    Block b;
    b.header = read_header(r);
    auto count = r.u64();
    // Each transaction needs at least 25 bytes; reject absurd counts before reserving.
    if (count > r.remaining() / 25) throw DecodeError("transaction count exceeds input");
    b.transactions.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t i = 0; i < count; ++i) {
        b.transactions.push_back(read_transaction(r));
        try {
            validate_transaction(b.transactions.back());
        } catch (const InvalidTransaction& e) {
            throw DecodeError(e.what());
        }
    }
    r.expect_end();
    return b;
}

void check_successor(ChainId chain_id, const BlockHeader* parent, const Block& block, TxRootCheck tx_root) {
    const auto& h = block.header;
    if (h.chain_id != chain_id) {
        throw ChainMismatch("block for chain " + std::to_string(h.chain_id) + " appended to chain " +
                            std::to_string(chain_id));
    }
    if (h.next_rank <= h.rank) {
        throw RankError("next_rank " + std::to_string(h.next_rank) + " must exceed rank " + std::to_string(h.rank));
    }
    const std::uint64_t expected_height = parent == nullptr ? 0 : parent->height + 1;
    if (h.height != expected_height) {
        throw LinkageError("expected height " + std::to_string(expected_height) + ", got " + std::to_string(h.height));
    }
    if (tx_root == TxRootCheck::Verify && h.tx_root != compute_tx_root(block.transactions)) {
        throw LinkageError("tx_root does not match transactions");
    }
    if (parent == nullptr) {
        if (h.parent_hash != kZeroHash) throw LinkageError("genesis parent_hash must be zero");
        if (h.rank != 0) throw RankError("genesis rank must be 0");
        return;
    }
    if (h.parent_hash != hash_header(*parent)) throw LinkageError("parent_hash does not match predecessor");
    if (h.rank != parent->next_rank) {
        throw RankError("rank " + std::to_string(h.rank) + " differs from predecessor next_rank " +
                        std::to_string(parent->next_rank));
    }
}

BlockHeader decode_block_header(ByteView encoded_block) {
    ByteReader r(encoded_block);
    return read_header(r);
}

void ChainLedger::check_append(const Block& block) const {
    check_successor(chain_id_, blocks_.empty() ? nullptr : &blocks_.back().header, block);
}

void ChainLedger::append(Block block) {
    check_append(block);
    blocks_.push_back(std::move(block));
}

ChainLedger append_block(ChainLedger ledger, Block block) {
    ledger.append(std::move(block));
    return ledger;
}

void write_ledger_file(const std::filesystem::path& path, const ChainLedger& ledger) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    for (const auto& b : ledger.blocks()) out << to_hex(encode_block(b)) << '\n';
}

ChainLedger read_ledger_file(const std::filesystem::path& path, ChainId chain_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    ChainLedger ledger(chain_id);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ledger.append(decode_block(from_hex(line)));
    }
    return ledger;
}

}  // namespace rvchain
