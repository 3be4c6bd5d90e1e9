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
#include <memory>
#include <span>
#include <vector>

#include "rvchain/event_queue.hpp"
#include "rvchain/ledger.hpp"

namespace rvchain::ordering {

class UnknownChain : public Error {
public:
    using Error::Error;
};

class IncompleteView : public Error {
public:
    using Error::Error;
};

class DanglingRef : public Error {
public:
    using Error::Error;
};

using BlockPtr = std::shared_ptr<const Block>;

struct ViewEntry {
    BlockPtr block;
    Hash32 hash{};
};

/// One node's local view of every shadow chain: for each chain, the ordered
/// partially-confirmed blocks it has learned about so far.
class GlobalView {
public:
    explicit GlobalView(std::size_t chain_count) : chains_(chain_count) {}

    std::size_t chain_count() const { return chains_.size(); }
    // True once the chain's genesis is present.
    bool has_chain(ChainId chain) const { return chain < chains_.size() && !chains_[chain].empty(); }
    // Throws UnknownChain if the chain has no blocks.
    const std::vector<ViewEntry>& chain(ChainId chain) const;
    std::size_t height_known(ChainId chain) const { return chain < chains_.size() ? chains_[chain].size() : 0; }
    std::size_t total_blocks() const;

    /// Appends the next block of its chain; same validation as ChainLedger.
    /// Chain ids outside [0, chain_count) raise ChainMismatch.
    void append(BlockPtr block, TxRootCheck tx_root = TxRootCheck::Verify);

    Tick observed_at = 0;

private:
    std::vector<std::vector<ViewEntry>> chains_;
};

struct OrderedBlockRef {
    Rank rank = 0;
    ChainId chain_id = 0;
    std::uint64_t height = 0;
    Hash32 block_hash{};

    bool operator==(const OrderedBlockRef&) const = default;
};

struct RankFields {
    Rank rank = 0;
    Rank next_rank = 0;
    bool operator==(const RankFields&) const = default;
};

/// NextRank of the chain's last block (y_i).
Rank expected_next_rank(const GlobalView& view, ChainId chain);

/// rank = y_chain, next_rank = max(rank + 1, x) with x the largest y over all known chains.
RankFields propose_rank_fields(const GlobalView& view, ChainId chain);

/// Same rule, but with `tip` standing in for the chain's last block. A leader
/// extends its log tip, which may be ahead of its committed view.
RankFields propose_rank_fields(const GlobalView& view, ChainId chain, const BlockHeader& tip);

/// Minimum y over all chains. Throws IncompleteView when any chain is missing.
Rank confirm_bar(const GlobalView& view);

/// Blocks with rank < confirm_bar(view), ascending by (rank, chain_id).
std::vector<OrderedBlockRef> total_order(const GlobalView& view);

std::vector<Transaction> flatten_transactions(std::span<const OrderedBlockRef> order, const GlobalView& view);

bool is_prefix(std::span<const OrderedBlockRef> prefix, std::span<const OrderedBlockRef> of);
inline bool prefix_comparable(std::span<const OrderedBlockRef> a, std::span<const OrderedBlockRef> b) {
    return a.size() <= b.size() ? is_prefix(a, b) : is_prefix(b, a);
}

}  // namespace rvchain::ordering
