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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rvchain/beacon.hpp"
#include "rvchain/event_queue.hpp"
#include "rvchain/ledger.hpp"
#include "rvchain/ordering.hpp"
#include "rvchain/raft.hpp"

namespace rvchain::sim {

using NodeId = std::uint32_t;

/// Invalid configuration; key() names the offending setting.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what) : Error(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

class AlreadyCrashed : public Error {
public:
    using Error::Error;
};

struct CrashSpec {
    Tick time = 0;
    NodeId node = 0;
    bool operator==(const CrashSpec&) const = default;
};

/// Complete description of one experiment. All times are integer ticks.
struct SimConfig {
    std::uint64_t seed = 1;
    std::size_t nodes = 5;   // N
    std::size_t chains = 1;  // C
    unsigned beacon_bits = 6;
    Tick delta = 10;  // synchrony bound of the beacon phase
    Tick raft_delay_min = 2;
    Tick raft_delay_max = 10;
    Tick election_timeout = 150;  // election deadlines drawn from [T, 2T)
    Tick heartbeat_interval = 30;
    Tick block_interval = 50;
    double tx_rate = 1.0;  // offered transactions per tick, all chains together
    double sensitive_fraction = 0.1;
    std::vector<CrashSpec> crash_schedule;
    Tick run_duration = 3000;  // workload and block production stop here
    Tick drain_duration = 1500;  // quiet period that lets views converge
    Tick sample_interval = 100;  // cadence of cross-node order checks
    std::size_t max_block_txs = 0;  // 0 = unlimited
    std::size_t payload_bytes = 32;
    bool empty_blocks = true;
    bool trace = false;
};

// Throws ConfigError naming the first invalid key.
void validate(const SimConfig& config);

struct ChainMetrics {
    std::size_t committee_size = 0;
    std::size_t crashes = 0;
    bool expected_stall = false;  // too many crashes for a quorum
    std::uint64_t committed_blocks = 0;  // excluding genesis, by run_duration
    std::uint64_t committed_txs = 0;     // by run_duration
    std::uint64_t committed_blocks_total = 0;
    std::uint64_t committed_txs_total = 0;
    std::vector<std::pair<raft::Term, NodeId>> leaders;  // every election won, in order
};

struct LatencySample {
    std::uint64_t tx_nonce = 0;
    ChainId chain = 0;
    bool sensitive = false;
    Tick submitted = 0;
    Tick confirmed = 0;
};

struct ConfirmBarPoint {
    Tick time = 0;
    Rank bar = 0;
};

struct SafetyViolation {
    Tick time = 0;
    std::string kind;
    std::string detail;
};

/// A block as it arrived in one node's view.
struct ViewArrival {
    Tick time = 0;
    ordering::BlockPtr block;
};

/// Everything one run produced. Deterministic in SimConfig.
struct SimTrace {
    SimConfig config;
    beacon::ChainAssignment assignment;
    std::vector<beacon::EpochOutcome> beacon_epochs;
    Tick raft_start = 0;  // end of the beacon phase
    Tick end_time = 0;
    NodeId observer = 0;  // latencies are measured where this node confirms
    std::vector<ChainMetrics> chains;
    std::vector<LatencySample> latencies;
    std::vector<ConfirmBarPoint> confirm_bar;  // observer's ConfirmBar, on every change
    std::map<std::string, std::uint64_t> message_counts;
    std::vector<SafetyViolation> violations;
    std::uint64_t txs_submitted = 0;
    std::uint64_t txs_lost = 0;  // held by a leader when it crashed
    std::uint64_t sealed_verified = 0;
    std::uint64_t order_checks = 0;
    std::uint64_t log_matching_checks = 0;
    std::uint64_t blocks_checked = 0;  // committed blocks whose rank fields were checked
    std::vector<std::optional<Tick>> crashed_at;
    std::vector<std::vector<ViewArrival>> view_log;  // per node
    std::vector<ordering::OrderedBlockRef> final_order;  // observer
    std::vector<std::string> trace_log;

    bool any_expected_stall() const;
    // Transactions committed by run_duration per tick of the block-production window.
    double committed_tx_per_time() const;
    // Transactions the observer fully confirmed by run_duration, per tick of the same window.
    double confirmed_tx_per_time() const;
};

/// Discrete-event run of the whole protocol: beacon epochs until a seed is
/// locked, chain assignment, per-chain Raft with block proposals, header
/// gossip and continuous safety checking.
class Simulation {
public:
    explicit Simulation(SimConfig config);
    ~Simulation();
    Simulation(Simulation&&) noexcept;
    Simulation& operator=(Simulation&&) noexcept;

    /// Schedules a crash-stop of `node` at `time`. Throws AlreadyCrashed if
    /// the node has crashed or already has a crash scheduled.
    void inject_crash(Tick time, NodeId node);

    void run_until(Tick time);
    Tick now() const;
    bool is_crashed(NodeId node) const;
    const raft::Node* raft_node(NodeId node) const;  // nullptr before the Raft phase
    const ordering::GlobalView& view(NodeId node) const;

    /// Runs to run_duration + drain_duration and returns the trace.
    SimTrace finish();

private:
    class Impl;
    std::unique_ptr<Impl> impl_;
};

SimTrace run_simulation(const SimConfig& config);

struct ScalingPoint {
    std::size_t chains = 0;
    std::size_t nodes = 0;
    double committed_tx_per_time = 0;
    double confirmed_tx_per_time = 0;
    std::size_t violations = 0;
};

/// One run per chain count with committee size and per-chain offered load
/// held at the base configuration's values.
std::vector<ScalingPoint> measure_scaling(const SimConfig& base, const std::vector<std::size_t>& chain_counts);

}  // namespace rvchain::sim
