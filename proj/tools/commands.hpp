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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rvchain/simnet.hpp"

namespace rvchain::cli {

enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitUsage = 2 };

struct RunOptions {
    std::filesystem::path config_path;
    std::filesystem::path out_dir;  // empty: take out_dir from the config file
    std::optional<std::uint64_t> seed;
    bool trace = false;
};

struct BeaconStatsOptions {
    std::size_t nodes = 64;
    unsigned bits = 6;
    std::uint64_t epochs = 20000;
    std::uint64_t seed = 1;
    Tick delta = 10;
    std::filesystem::path out_dir;
};

struct ScaleOptions {
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    std::string chains;  // empty: take chain_counts from the config file
    std::optional<std::uint64_t> seed;
};

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_beacon_stats(const BeaconStatsOptions& options, std::ostream& out, std::ostream& err);
int cmd_scale(const ScaleOptions& options, std::ostream& out, std::ostream& err);
// With a non-empty out_dir, writes order_node_<id>.csv (position,rank,chain_id,height,block_hash,tx_count)
// holding each node's final total order.
int cmd_verify_order(const std::filesystem::path& trace_dir, const std::filesystem::path& out_dir, std::ostream& out,
                     std::ostream& err);

/// Result of replaying recorded views: per-snapshot total orders checked for
/// prefix consistency, final agreement and (on small views) the brute-force
/// reference.
struct OrderCheckReport {
    std::size_t nodes = 0;
    std::size_t snapshots = 0;
    std::size_t oracle_checks = 0;
    std::vector<std::string> problems;
    std::vector<std::pair<std::size_t, std::string>> final_order_csv;  // node id, CSV text
};

// Throws rvchain::Error when the directory holds no usable view records.
OrderCheckReport verify_recorded_views(const std::filesystem::path& trace_dir);

struct ScalingSummary {
    double slope = 0;  // least-squares fit through the origin
    std::vector<double> deviation;  // (T_C - C * T_1) / (C * T_1) per point
};
ScalingSummary summarize_scaling(const std::vector<sim::ScalingPoint>& points);

}  // namespace rvchain::cli
