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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rvchain/beacon.hpp"
#include "rvchain/simnet.hpp"

namespace rvchain::sim {

// Column layouts:
//   throughput.csv  chain,committee_size,crashes,expected_stall,committed_blocks,committed_txs,
//                   committed_tx_per_time,committed_blocks_total,committed_txs_total
//   latency.csv     tx_nonce,chain,sensitive,submitted,confirmed,latency
//   confirmbar.csv  time,confirm_bar
//   beacon.csv      epoch,succeeded,num_certificates,seed,messages_sent
//   safety.csv      time,kind,detail
//   messages.csv    variant,count
//   views/manifest.csv  node,chain,crashed_at,expected_stall,arrivals
//   views/node_<id>.csv arrival_time,chain_id,height,parent_hash,rank,next_rank,tx_root,
//                       proposer_term,block_hash,tx_count
//   trace.csv       sim_time,src,dst,variant,term,detail (only with tracing on)
std::string throughput_csv(const SimTrace& trace);
std::string latency_csv(const SimTrace& trace);
std::string confirmbar_csv(const SimTrace& trace);
std::string beacon_csv(std::span<const beacon::EpochOutcome> epochs);
std::string safety_csv(const SimTrace& trace);
std::string messages_csv(const SimTrace& trace);
std::string summary_text(const SimTrace& trace, const std::vector<std::string>& defaulted);

struct LatencyStats {
    std::size_t count = 0;
    double mean = 0;
    double p95 = 0;  // nearest-rank
};
LatencyStats latency_stats(const SimTrace& trace);

/// Writes every run output into out_dir (created if needed).
void write_run_outputs(const SimTrace& trace, const std::filesystem::path& out_dir,
                       const std::vector<std::string>& defaulted = {});

void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

// Fixed-precision decimal rendering used by every report.
std::string format_double(double value, int precision = 6);
std::string csv_escape(const std::string& field);

}  // namespace rvchain::sim
