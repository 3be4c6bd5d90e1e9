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

#include <vector>

#include "rvchain/ordering.hpp"

namespace rvchain::reference {

/// Brute-force total order for cross-checking ordering::total_order.
///
/// Enumerates every block, takes the minimum over chains of the last block's
/// next_rank, keeps blocks strictly below it and stable-sorts by
/// (rank, chain_id). Shares no code with the merge-based implementation.
std::vector<ordering::OrderedBlockRef> brute_force_total_order(const ordering::GlobalView& view);

}  // namespace rvchain::reference
