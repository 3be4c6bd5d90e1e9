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

#include "rvchain/reference/ordering_reference.hpp"
#include "test_support.hpp"

namespace rvchain::ordering {
namespace {

using testing::random_view;

// Chains given as (rank, next_rank) lists for the blocks after genesis.
GlobalView view_of(const std::vector<std::vector<std::pair<Rank, Rank>>>& chains) {
    GlobalView view(chains.size());
    for (ChainId c = 0; c < chains.size(); ++c) {
        auto tip = std::make_shared<const Block>(make_genesis(c));
        view.append(tip);
        for (const auto& [rank, next] : chains[c]) {
            tip = std::make_shared<const Block>(make_child_block(tip->header, rank, next, 1, {}));
            view.append(tip);
        }
    }
    return view;
}

std::vector<std::tuple<Rank, ChainId, std::uint64_t>> shape(const std::vector<OrderedBlockRef>& order) {
    std::vector<std::tuple<Rank, ChainId, std::uint64_t>> out;
    for (const auto& r : order) out.emplace_back(r.rank, r.chain_id, r.height);
    return out;
}

TEST(ExpectedNextRank, ReadsLastBlock) {
    EXPECT_EQ(expected_next_rank(view_of({{}}), 0), 1u);
    EXPECT_EQ(expected_next_rank(view_of({{{1, 4}, {4, 7}}}), 0), 7u);
    EXPECT_THROW(expected_next_rank(view_of({{}}), 3), UnknownChain);
}

TEST(ProposeRankFields, AllAtGenesis) {
    EXPECT_EQ(propose_rank_fields(view_of({{}, {}, {}}), 0), (RankFields{1, 2}));
}

TEST(ProposeRankFields, LaggingChainCatchesUp) {
    auto view = view_of({{}, {{1, 5}}});
    EXPECT_EQ(propose_rank_fields(view, 0), (RankFields{1, 5}));
}

TEST(ProposeRankFields, LongestChainAdvancesByOne) {
    auto view = view_of({{{1, 9}}, {{1, 4}, {4, 10}}});
    EXPECT_EQ(expected_next_rank(view, 0), 9u);
    EXPECT_EQ(propose_rank_fields(view, 0), (RankFields{9, 10}));
    auto leading = view_of({{{1, 9}, {9, 12}}, {{1, 4}, {4, 10}}});
    EXPECT_EQ(propose_rank_fields(leading, 0), (RankFields{12, 13}));
}

TEST(ProposeRankFields, UsesGivenTip) {
    auto view = view_of({{}, {{1, 5}}});
    auto tip = make_child_block(make_genesis(0).header, 1, 5, 1, {}).header;
    EXPECT_EQ(propose_rank_fields(view, 0, tip), (RankFields{5, 6}));
    EXPECT_THROW(propose_rank_fields(view, 1, tip), ChainMismatch);
}

TEST(ConfirmBar, MinimumOfExpectedRanks) {
    EXPECT_EQ(confirm_bar(view_of({{{1, 3}}, {{1, 7}}, {{1, 5}}})), 3u);
    EXPECT_EQ(confirm_bar(view_of({{{1, 4}}})), 4u);
    EXPECT_EQ(confirm_bar(view_of({{{1, 4}}, {}})), 1u);
}

TEST(ConfirmBar, IncompleteViewRejected) {
    GlobalView view(2);
    view.append(std::make_shared<const Block>(make_genesis(0)));
    EXPECT_THROW(confirm_bar(view), IncompleteView);
    EXPECT_THROW(confirm_bar(GlobalView(0)), IncompleteView);
}

TEST(TotalOrder, GenesisTieBrokenByChainId) {
    auto order = total_order(view_of({{}, {}}));
    ASSERT_EQ(order.size(), 2u);
    EXPECT_EQ(order[0].chain_id, 0u);
    EXPECT_EQ(order[1].chain_id, 1u);
    EXPECT_EQ(order[0].block_hash, hash_header(make_genesis(0).header));
}

TEST(TotalOrder, MergesByRankThenChain) {
    auto view = view_of({{{1, 2}}, {{1, 3}}});
    EXPECT_EQ(confirm_bar(view), 2u);
    using T = std::tuple<Rank, ChainId, std::uint64_t>;
    EXPECT_EQ(shape(total_order(view)), (std::vector<T>{{0, 0, 0}, {0, 1, 0}, {1, 0, 1}, {1, 1, 1}}));
    auto view2 = view_of({{{1, 2}}, {}});
    EXPECT_EQ(confirm_bar(view2), 1u);
    EXPECT_EQ(shape(total_order(view2)), (std::vector<T>{{0, 0, 0}, {0, 1, 0}}));
}

TEST(TotalOrder, PendingBlockAtBarExcluded) {
    auto view = view_of({{{1, 2}}, {{1, 3}, {3, 4}}});
    // bar = min(2, 4) = 2; chain 1's rank-3 block waits.
    auto order = total_order(view);
    for (const auto& r : order) EXPECT_LT(r.rank, 2u);
    EXPECT_EQ(order.size(), 4u);
}

TEST(FlattenTransactions, ConcatenatesInOrder) {
    Transaction x{{1}, false, 0, 1}, y{{2}, false, 0, 2}, z{{3}, false, 0, 3};
    GlobalView view(2);
    auto g0 = std::make_shared<const Block>(make_genesis(0));
    auto g1 = std::make_shared<const Block>(make_genesis(1));
    view.append(g0);
    view.append(g1);
    view.append(std::make_shared<const Block>(make_child_block(g0->header, 1, 2, 1, {x})));
    view.append(std::make_shared<const Block>(make_child_block(g1->header, 1, 2, 1, {y, z})));
    auto order = total_order(view);
    EXPECT_EQ(flatten_transactions(order, view), (std::vector<Transaction>{x, y, z}));
    std::vector<OrderedBlockRef> just_b1{order[2]};
    EXPECT_EQ(flatten_transactions(just_b1, view), (std::vector<Transaction>{x}));
}

TEST(FlattenTransactions, DanglingReference) {
    auto view = view_of({{}});
    std::vector<OrderedBlockRef> missing{{1, 0, 5, {}}};
    EXPECT_THROW(flatten_transactions(missing, view), DanglingRef);
    auto order = total_order(view);
    order[0].block_hash[0] ^= 1;
    EXPECT_THROW(flatten_transactions(order, view), DanglingRef);
}

TEST(GlobalView, RejectsBadAppends) {
    GlobalView view(1);
    EXPECT_THROW(view.append(std::make_shared<const Block>(make_genesis(1))), ChainMismatch);
    view.append(std::make_shared<const Block>(make_genesis(0)));
    auto skip = make_child_block(make_genesis(0).header, 2, 3, 1, {});
    EXPECT_THROW(view.append(std::make_shared<const Block>(skip)), RankError);
    EXPECT_EQ(view.total_blocks(), 1u);
}

TEST(Prefix, Helpers) {
    auto order = total_order(view_of({{{1, 2}}, {{1, 3}}}));
    std::span<const OrderedBlockRef> all(order);
    EXPECT_TRUE(is_prefix(all.first(2), all));
    EXPECT_FALSE(is_prefix(all, all.first(2)));
    EXPECT_TRUE(prefix_comparable(all, all.first(1)));
    auto other = order;
    std::swap(other[0], other[1]);
    EXPECT_FALSE(prefix_comparable(all, other));
}

TEST(OrderingProperties, MatchesBruteForceReference) {
    DeterministicStream rng("test/ordering-oracle", 1);
    for (int i = 0; i < 10000; ++i) {
        const std::size_t chains = 1 + rng.below(4);
        std::vector<std::size_t> lengths(chains);
        for (auto& l : lengths) l = rng.below(6);  // at most 6 blocks per chain including genesis
        auto view = random_view(rng, lengths);
        ASSERT_EQ(total_order(view), reference::brute_force_total_order(view)) << "case " << i;
    }
}

TEST(OrderingProperties, SubviewOrdersArePrefixes) {
    DeterministicStream rng("test/ordering-prefix", 1);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t chains = 1 + rng.below(5);
        std::vector<std::size_t> lengths(chains);
        for (auto& l : lengths) l = rng.below(12);
        auto full = random_view(rng, lengths);
        GlobalView partial(chains);
        for (ChainId c = 0; c < chains; ++c) {
            const auto& list = full.chain(c);
            const std::size_t keep = 1 + rng.below(list.size());
            for (std::size_t k = 0; k < keep; ++k) partial.append(list[k].block);
        }
        ASSERT_TRUE(is_prefix(total_order(partial), total_order(full))) << "case " << i;
    }
}

TEST(OrderingProperties, ProposalsRespectRankRulesAndBar) {
    DeterministicStream rng("test/ordering-propose", 1);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t chains = 1 + rng.below(5);
        std::vector<std::size_t> lengths(chains);
        for (auto& l : lengths) l = rng.below(8);
        auto view = random_view(rng, lengths, 6);
        const auto chain = static_cast<ChainId>(rng.below(chains));
        auto fields = propose_rank_fields(view, chain);
        Rank x = 0;
        for (ChainId c = 0; c < chains; ++c) x = std::max(x, expected_next_rank(view, c));
        EXPECT_GT(fields.next_rank, fields.rank);
        EXPECT_GE(fields.next_rank, x);
        EXPECT_EQ(fields.rank, expected_next_rank(view, chain));
        EXPECT_GE(fields.rank, confirm_bar(view));
        auto block = make_child_block(view.chain(chain).back().block->header, fields.rank, fields.next_rank, 1, {});
        EXPECT_NO_THROW(view.append(std::make_shared<const Block>(block)));
    }
}

TEST(OrderingProperties, BarAdvancesWhenEveryChainProduces) {
    DeterministicStream rng("test/ordering-liveness", 1);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t chains = 1 + rng.below(6);
        auto view = random_view(rng, std::vector<std::size_t>(chains, 0));
        Rank bar = confirm_bar(view);
        for (int round = 0; round < 20; ++round) {
            // Each chain appends one block in a random order; after a full round the bar must rise.
            std::vector<ChainId> order(chains);
            for (ChainId c = 0; c < chains; ++c) order[c] = c;
            for (std::size_t k = chains; k-- > 1;) std::swap(order[k], order[rng.below(k + 1)]);
            for (ChainId c : order) {
                auto fields = propose_rank_fields(view, c);
                view.append(std::make_shared<const Block>(
                    make_child_block(view.chain(c).back().block->header, fields.rank, fields.next_rank, 1, {})));
            }
            Rank next_bar = confirm_bar(view);
            ASSERT_GT(next_bar, bar);
            bar = next_bar;
        }
    }
}

}  // namespace
}  // namespace rvchain::ordering
