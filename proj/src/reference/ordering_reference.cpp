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

#include "rvchain/reference/ordering_reference.hpp"

#include <algorithm>
#include <limits>

namespace rvchain::reference {

std::vector<ordering::OrderedBlockRef> brute_force_total_order(const ordering::GlobalView& view) {
    std::vector<ordering::OrderedBlockRef> all;
    Rank bar = std::numeric_limits<Rank>::max();
    for (ChainId c = 0; c < view.chain_count(); ++c) {
        const auto& list = view.chain(c);
        std::uint64_t tallest = 0;
        Rank last_next = 0;
        for (const auto& entry : list) {
            const auto& h = entry.block->header;
            all.push_back({h.rank, h.chain_id, h.height, hash_header(h)});
            if (h.height >= tallest) {
                tallest = h.height;
                last_next = h.next_rank;
            }
        }
        bar = std::min(bar, last_next);
    }
    std::vector<ordering::OrderedBlockRef> kept;
    for (const auto& ref : all) {
        if (ref.rank < bar) kept.push_back(ref);
    }
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.rank != b.rank) return a.rank < b.rank;
        return a.chain_id < b.chain_id;
    });
    return kept;
}

}  // namespace rvchain::reference
