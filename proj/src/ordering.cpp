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

#include "rvchain/ordering.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace rvchain::ordering {

const std::vector<ViewEntry>& GlobalView::chain(ChainId chain) const {
    if (!has_chain(chain)) throw UnknownChain("chain " + std::to_string(chain) + " is not in the view");
    return chains_[chain];
}

std::size_t GlobalView::total_blocks() const {
    std::size_t total = 0;
    for (const auto& c : chains_) total += c.size();
    return total;
}

void GlobalView::append(BlockPtr block, TxRootCheck tx_root) {
    const ChainId id = block->header.chain_id;
    if (id >= chains_.size()) {
        throw ChainMismatch("chain " + std::to_string(id) + " is outside a view of " +
                            std::to_string(chains_.size()) + " chains");
    }
    auto& list = chains_[id];
    check_successor(id, list.empty() ? nullptr : &list.back().block->header, *block, tx_root);
    Hash32 hash = hash_header(block->header);
    list.push_back(ViewEntry{std::move(block), hash});
}

Rank expected_next_rank(const GlobalView& view, ChainId chain) {
    return view.chain(chain).back().block->header.next_rank;
}

RankFields propose_rank_fields(const GlobalView& view, ChainId chain) {
    return propose_rank_fields(view, chain, view.chain(chain).back().block->header);
}

RankFields propose_rank_fields(const GlobalView& view, ChainId chain, const BlockHeader& tip) {
    if (tip.chain_id != chain) throw ChainMismatch("tip belongs to another chain");
    RankFields out;
    out.rank = tip.next_rank;
    Rank x = out.rank;
    for (ChainId c = 0; c < view.chain_count(); ++c) {
        if (c != chain && view.has_chain(c)) x = std::max(x, expected_next_rank(view, c));
    }
    out.next_rank = std::max(out.rank + 1, x);
    return out;
}

Rank confirm_bar(const GlobalView& view) {
    if (view.chain_count() == 0) throw IncompleteView("view has no chains");
    Rank bar = 0;
    for (ChainId c = 0; c < view.chain_count(); ++c) {
        if (!view.has_chain(c)) throw IncompleteView("chain " + std::to_string(c) + " missing from view");
        Rank y = expected_next_rank(view, c);
        bar = c == 0 ? y : std::min(bar, y);
    }
    return bar;
}

std::vector<OrderedBlockRef> total_order(const GlobalView& view) {
    const Rank bar = confirm_bar(view);
    // Per-chain ranks are strictly increasing, so a k-way merge on (rank, chain) suffices.
    struct Cursor {
        Rank rank;
        ChainId chain;
        std::size_t pos;
    };
    auto later = [](const Cursor& a, const Cursor& b) { return a.rank != b.rank ? a.rank > b.rank : a.chain > b.chain; };
    std::priority_queue<Cursor, std::vector<Cursor>, decltype(later)> heads(later);
    for (ChainId c = 0; c < view.chain_count(); ++c) {
        const auto& list = view.chain(c);
        heads.push(Cursor{list.front().block->header.rank, c, 0});
    }
    std::vector<OrderedBlockRef> out;
    while (!heads.empty()) {
        Cursor cur = heads.top();
        heads.pop();
        if (cur.rank >= bar) continue;
        const auto& list = view.chain(cur.chain);
        const auto& entry = list[cur.pos];
        out.push_back(OrderedBlockRef{cur.rank, cur.chain, entry.block->header.height, entry.hash});
        if (cur.pos + 1 < list.size()) heads.push(Cursor{list[cur.pos + 1].block->header.rank, cur.chain, cur.pos + 1});
    }
    return out;
}

std::vector<Transaction> flatten_transactions(std::span<const OrderedBlockRef> order, const GlobalView& view) {
    std::vector<Transaction> out;
    for (const auto& ref : order) {
        if (!view.has_chain(ref.chain_id) || ref.height >= view.height_known(ref.chain_id)) {
            throw DanglingRef("block " + std::to_string(ref.chain_id) + "/" + std::to_string(ref.height) +
                              " is not in the view");
        }
        const auto& entry = view.chain(ref.chain_id)[ref.height];
        if (entry.hash != ref.block_hash) throw DanglingRef("block hash does not match the view");
        const auto& txs = entry.block->transactions;
        out.insert(out.end(), txs.begin(), txs.end());
    }
    return out;
}

bool is_prefix(std::span<const OrderedBlockRef> prefix, std::span<const OrderedBlockRef> of) {
    return prefix.size() <= of.size() && std::equal(prefix.begin(), prefix.end(), of.begin());
}

}  // namespace rvchain::ordering
