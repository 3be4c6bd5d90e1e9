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

#include "rvchain/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "rvchain/sealing.hpp"

namespace rvchain::sim {

namespace {

constexpr Tick kNever = std::numeric_limits<Tick>::max();
constexpr std::size_t kMaxBeaconEpochs = 10000;

struct BlockGossip {
    ordering::BlockPtr block;
};

using WireMessage = std::variant<raft::Message, BlockGossip>;

struct Delivery {
    NodeId from = 0;
    NodeId to = 0;
    WireMessage msg;
};

enum class TimerKind { Raft, Propose, Workload, Sample };

struct TimerFire {
    NodeId node = 0;
    TimerKind kind = TimerKind::Raft;
};

struct ClientSubmit {
    ChainId chain = 0;
    Transaction tx;
};

struct CrashEvent {
    NodeId node = 0;
};

using Payload = std::variant<Delivery, TimerFire, ClientSubmit, CrashEvent>;

struct CommittedEntry {
    SharedBytes command;
    ordering::BlockPtr block;
    Tick first_commit = 0;
};

struct ChainState {
    std::vector<NodeId> committee;
    ordering::BlockPtr genesis;
    std::vector<CommittedEntry> committed;  // committed[k - 1] is log index / height k
    std::deque<Transaction> backlog;         // arrivals while no leader was reachable
    std::map<raft::Term, NodeId> leader_of_term;
};

struct SubmitInfo {
    Tick time = 0;
    ChainId chain = 0;
    bool sensitive = false;
    Hash32 plaintext_hash{};
};

struct NodeState {
    NodeId id = 0;
    ChainId chain = 0;
    bool crashed = false;
    std::optional<raft::Node> raft;
    ordering::GlobalView view{0};
    std::deque<Transaction> mempool;
    raft::LogIndex applied = 0;
    raft::Term last_term_seen = 0;
    raft::LogIndex last_commit_seen = 0;
    Tick wakeup = kNever;
    // Incremental confirmed order: per-chain cursor into the view, the
    // ConfirmBar last acted on and the length of the confirmed prefix.
    std::vector<std::size_t> cursor;
    Rank bar = 0;
    std::size_t confirmed = 0;
};

std::string raft_detail(const raft::Message& msg) {
    std::ostringstream os;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, raft::VoteRequest>) {
                os << "candidate=" << m.candidate_id << " last=" << m.last_log_index << "/" << m.last_log_term;
            } else if constexpr (std::is_same_v<T, raft::VoteReply>) {
                os << "granted=" << (m.granted ? 1 : 0);
            } else if constexpr (std::is_same_v<T, raft::AppendEntries>) {
                os << "prev=" << m.prev_log_index << "/" << m.prev_log_term << " entries=" << m.entries.size()
                   << " commit=" << m.leader_commit;
            } else {
                os << "success=" << (m.success ? 1 : 0) << " match=" << m.match_index;
            }
        },
        msg);
    return os.str();
}

}  // namespace

void validate(const SimConfig& c) {
    if (c.nodes == 0) throw ConfigError("nodes", "must be at least 1");
    if (c.chains == 0) throw ConfigError("chains", "must be at least 1");
    if (c.chains > c.nodes) {
        throw ConfigError("chains", "chain count " + std::to_string(c.chains) + " exceeds node count " +
                                        std::to_string(c.nodes));
    }
    if (c.nodes > std::numeric_limits<NodeId>::max()) throw ConfigError("nodes", "too many nodes");
    if (c.beacon_bits < 1 || c.beacon_bits > 64) throw ConfigError("beacon_bits", "must be in [1, 64]");
    if (c.delta == 0) throw ConfigError("delta", "must be at least 1");
    if (c.raft_delay_min == 0) throw ConfigError("raft_delay_min", "must be at least 1");
    if (c.raft_delay_max < c.raft_delay_min) throw ConfigError("raft_delay_max", "must be >= raft_delay_min");
    if (c.election_timeout == 0) throw ConfigError("election_timeout", "must be at least 1");
    if (c.heartbeat_interval == 0) throw ConfigError("heartbeat_interval", "must be at least 1");
    if (c.heartbeat_interval >= c.election_timeout) {
        throw ConfigError("heartbeat_interval", "must be shorter than election_timeout");
    }
    if (c.block_interval == 0) throw ConfigError("block_interval", "must be at least 1");
    if (!(c.tx_rate >= 0.0) || !std::isfinite(c.tx_rate)) throw ConfigError("tx_rate", "must be a finite rate >= 0");
    if (!(c.sensitive_fraction >= 0.0 && c.sensitive_fraction <= 1.0)) {
        throw ConfigError("sensitive_fraction", "must be in [0, 1]");
    }
    if (c.run_duration == 0) throw ConfigError("run_duration", "must be at least 1");
    if (c.sample_interval == 0) throw ConfigError("sample_interval", "must be at least 1");
    std::vector<NodeId> seen;
    for (const auto& crash : c.crash_schedule) {
        if (crash.node >= c.nodes) throw ConfigError("crash_schedule", "node " + std::to_string(crash.node) + " does not exist");
        if (crash.time >= c.run_duration) throw ConfigError("crash_schedule", "crash times must be before run_duration");
        if (std::find(seen.begin(), seen.end(), crash.node) != seen.end()) {
            throw ConfigError("crash_schedule", "node " + std::to_string(crash.node) + " is crashed twice");
        }
        seen.push_back(crash.node);
    }
}

bool SimTrace::any_expected_stall() const {
    return std::any_of(chains.begin(), chains.end(), [](const ChainMetrics& c) { return c.expected_stall; });
}

double SimTrace::committed_tx_per_time() const {
    std::uint64_t txs = 0;
    for (const auto& c : chains) txs += c.committed_txs;
    Tick window = config.run_duration > raft_start ? config.run_duration - raft_start : 1;
    return static_cast<double>(txs) / static_cast<double>(window);
}

double SimTrace::confirmed_tx_per_time() const {
    std::uint64_t txs = 0;
    for (const auto& l : latencies) {
        if (l.confirmed <= config.run_duration) ++txs;
    }
    Tick window = config.run_duration > raft_start ? config.run_duration - raft_start : 1;
    return static_cast<double>(txs) / static_cast<double>(window);
}

class Simulation::Impl {
public:
    explicit Impl(SimConfig config)
        : config_(std::move(config)),
          delays_("rvchain/sim/delays", config_.seed),
          workload_("rvchain/sim/workload", config_.seed),
          sealer_(make_seal_key()) {
        validate(config_);
        keys_.add(sealer_.key());
        trace_.config = config_;
        trace_.crashed_at.assign(config_.nodes, std::nullopt);
        trace_.view_log.resize(config_.nodes);
        for (const auto& crash : config_.crash_schedule) queue_.push(crash.time, CrashEvent{crash.node});
        scheduled_crash_.assign(config_.nodes, false);
        for (const auto& crash : config_.crash_schedule) scheduled_crash_[crash.node] = true;
    }

    Tick end_time() const { return config_.run_duration + config_.drain_duration; }
    Tick now() const { return queue_.now(); }

    void inject_crash(Tick time, NodeId node) {
        if (node >= config_.nodes) throw ConfigError("crash_schedule", "node " + std::to_string(node) + " does not exist");
        if (scheduled_crash_[node] || (started_ && nodes_[node].crashed)) {
            throw AlreadyCrashed("node " + std::to_string(node) + " is already crashed or scheduled to crash");
        }
        scheduled_crash_[node] = true;
        config_.crash_schedule.push_back({std::max(time, now()), node});
        trace_.config.crash_schedule = config_.crash_schedule;
        queue_.push(std::max(time, now()), CrashEvent{node});
        if (started_) refresh_stall_labels();
    }

    bool is_crashed(NodeId node) const { return started_ ? nodes_.at(node).crashed : false; }

    const raft::Node* raft_node(NodeId node) const {
        if (!started_) return nullptr;
        const auto& n = nodes_.at(node);
        return n.raft ? &*n.raft : nullptr;
    }

    const ordering::GlobalView& view(NodeId node) {
        start();
        return nodes_.at(node).view;
    }

    void run_until(Tick limit) {
        start();
        limit = std::min(limit, end_time());
        while (!queue_.empty() && queue_.next_time() <= limit) {
            auto ev = queue_.pop();
            std::visit([&](auto& payload) { handle(payload); }, ev.payload);
        }
    }

    SimTrace finish() {
        run_until(end_time());
        trace_.end_time = end_time();
        check_orders(true);
        finalize_metrics();
        return std::move(trace_);
    }

private:
    SealKey make_seal_key() {
        DeterministicStream keys("rvchain/sim/seal-keys", config_.seed);
        return generate_seal_key(keys, 0);
    }

    void violation(std::string kind, std::string detail) {
        trace_.violations.push_back({now(), std::move(kind), std::move(detail)});
    }

    // --- setup -----------------------------------------------------------

    void start() {
        if (started_) return;
        started_ = true;
        run_beacon_phase();
        build_chains();
        schedule_initial_events();
    }

    void run_beacon_phase() {
        auto network = beacon::BeaconNetwork::create(config_.nodes, config_.beacon_bits, config_.seed);
        DeterministicStream delays("rvchain/sim/beacon-delays", config_.seed);
        beacon::Epoch epoch = 0;
        for (std::size_t i = 0; i < kMaxBeaconEpochs; ++i, ++epoch) {
            const Tick epoch_start = epoch * config_.delta;
            std::vector<char> alive_chars(config_.nodes, 1);
            for (const auto& crash : config_.crash_schedule) {
                if (crash.time <= epoch_start) alive_chars[crash.node] = 0;
            }
            std::unique_ptr<bool[]> alive(new bool[config_.nodes]);
            for (std::size_t k = 0; k < config_.nodes; ++k) alive[k] = alive_chars[k] != 0;
            auto outcome = beacon::run_beacon_epoch(network, epoch, config_.delta, delays,
                                                    std::span<const bool>(alive.get(), config_.nodes));
            trace_.message_counts["BeaconCertificate"] += outcome.messages_sent;
            trace_.beacon_epochs.push_back(outcome);
            if (!outcome.agreement) violation("beacon_agreement", "nodes locked different seeds in epoch " + std::to_string(epoch));
            if (outcome.succeeded) {
                trace_.raft_start = (epoch + 1) * config_.delta;
                trace_.assignment = beacon::assign_chains(outcome.seed, config_.nodes, config_.chains, epoch);
                return;
            }
        }
        throw Error("beacon produced no seed within " + std::to_string(kMaxBeaconEpochs) + " epochs");
    }

    void build_chains() {
        const auto& assignment = trace_.assignment;
        chains_.resize(config_.chains);
        trace_.chains.resize(config_.chains);
        for (ChainId c = 0; c < config_.chains; ++c) {
            auto committee = assignment.committees[c];
            std::sort(committee.begin(), committee.end());
            chains_[c].committee = committee;
            chains_[c].genesis = std::make_shared<const Block>(make_genesis(c));
            trace_.chains[c].committee_size = committee.size();
        }
        refresh_stall_labels();

        const raft::Timing timing{config_.election_timeout, config_.heartbeat_interval};
        const Tick t0 = trace_.raft_start;
        nodes_.resize(config_.nodes);
        for (NodeId id = 0; id < config_.nodes; ++id) {
            auto& node = nodes_[id];
            node.id = id;
            node.chain = assignment.chain_of[id];
            node.raft.emplace(id, chains_[node.chain].committee, timing,
                              DeterministicStream("rvchain/sim/timeouts", config_.seed, id), t0);
            node.view = ordering::GlobalView(config_.chains);
            node.view.observed_at = t0;
            for (const auto& chain : chains_) {
                node.view.append(chain.genesis);
                trace_.view_log[id].push_back({t0, chain.genesis});
            }
        }
        pending_gossip_.assign(config_.nodes, {});

        trace_.observer = 0;
        for (NodeId id = 0; id < config_.nodes; ++id) {
            if (!scheduled_crash_[id]) {
                trace_.observer = id;
                break;
            }
        }
        queue_now_hint_ = t0;
        for (auto& node : nodes_) {
            node.cursor.assign(config_.chains, 0);
            advance_confirmed(node);
        }
    }

    void refresh_stall_labels() {
        for (auto& c : trace_.chains) c.crashes = 0;
        for (const auto& crash : config_.crash_schedule) {
            trace_.chains[trace_.assignment.chain_of[crash.node]].crashes++;
        }
        for (auto& c : trace_.chains) {
            c.expected_stall = c.committee_size - c.crashes < raft::quorum_threshold(c.committee_size);
        }
    }

    void schedule_initial_events() {
        const Tick t0 = trace_.raft_start;
        for (auto& node : nodes_) {
            schedule_wakeup(node, t0);
            queue_.push(t0 + config_.block_interval, TimerFire{node.id, TimerKind::Propose});
        }
        queue_.push(t0, TimerFire{0, TimerKind::Workload});
        queue_.push(t0 + config_.sample_interval, TimerFire{0, TimerKind::Sample});
    }

    void schedule_wakeup(NodeState& node, Tick floor) {
        Tick d = std::max(node.raft->next_deadline(), floor);
        if (d < node.wakeup) {
            node.wakeup = d;
            queue_.push(d, TimerFire{node.id, TimerKind::Raft});
        }
    }

    // --- event handlers --------------------------------------------------

    void handle(Delivery& d) {
        auto& node = nodes_[d.to];
        if (config_.trace) log_delivery(d);
        if (node.crashed) return;
        if (auto* msg = std::get_if<raft::Message>(&d.msg)) {
            auto before = snapshot(node);
            auto out = node.raft->receive(d.from, *msg, now());
            after_raft(node, before, std::move(out));
        } else {
            on_gossip(node, std::get<BlockGossip>(d.msg).block);
        }
    }

    void handle(TimerFire& t) {
        switch (t.kind) {
            case TimerKind::Raft: {
                auto& node = nodes_[t.node];
                if (node.crashed) return;
                if (now() >= node.wakeup) node.wakeup = kNever;
                auto before = snapshot(node);
                auto out = node.raft->tick(now());
                after_raft(node, before, std::move(out));
                return;
            }
            case TimerKind::Propose: {
                auto& node = nodes_[t.node];
                if (node.crashed) return;
                maybe_propose(node);
                if (now() + config_.block_interval <= end_time()) {
                    queue_.push(now() + config_.block_interval, TimerFire{t.node, TimerKind::Propose});
                }
                return;
            }
            case TimerKind::Workload:
                generate_workload();
                if (now() + 1 < config_.run_duration) queue_.push(now() + 1, TimerFire{0, TimerKind::Workload});
                return;
            case TimerKind::Sample:
                check_orders(false);
                if (now() + config_.sample_interval <= end_time()) {
                    queue_.push(now() + config_.sample_interval, TimerFire{0, TimerKind::Sample});
                }
                return;
        }
    }

    void handle(ClientSubmit& s) {
        NodeState* leader = find_leader(s.chain);
        if (leader != nullptr) {
            leader->mempool.push_back(std::move(s.tx));
        } else {
            chains_[s.chain].backlog.push_back(std::move(s.tx));
        }
    }

    void handle(CrashEvent& c) {
        auto& node = nodes_[c.node];
        if (node.crashed) return;
        node.crashed = true;
        trace_.crashed_at[c.node] = now();
        trace_.txs_lost += node.mempool.size();
        node.mempool.clear();
        if (config_.trace) {
            trace_.trace_log.push_back(std::to_string(now()) + ",-," + std::to_string(c.node) + ",Crash,0,");
        }
    }

    // --- raft plumbing ---------------------------------------------------

    struct Before {
        raft::Role role;
        raft::Term term;
        raft::LogIndex commit;
    };

    static Before snapshot(const NodeState& node) {
        return {node.raft->role(), node.raft->current_term(), node.raft->commit_index()};
    }

    void send(NodeId from, NodeId to, WireMessage msg, const char* kind) {
        trace_.message_counts[kind]++;
        queue_.push(now() + delays_.between(config_.raft_delay_min, config_.raft_delay_max),
                    Delivery{from, to, std::move(msg)});
    }

    void after_raft(NodeState& node, const Before& before, raft::Outbox out) {
        const auto& r = *node.raft;
        for (auto& env : out) {
            const char* kind = raft::variant_name(env.message);
            send(env.from, env.to, std::move(env.message), kind);
        }
        if (r.current_term() < node.last_term_seen) violation("term_monotonicity", "node " + std::to_string(node.id));
        if (r.commit_index() < node.last_commit_seen) violation("commit_monotonicity", "node " + std::to_string(node.id));
        node.last_term_seen = r.current_term();
        node.last_commit_seen = std::max(node.last_commit_seen, r.commit_index());

        const bool is_leader = r.role() == raft::Role::Leader;
        if (is_leader && (before.role != raft::Role::Leader || before.term != r.current_term())) on_elected(node);
        if (before.role == raft::Role::Leader && !is_leader) {
            auto& backlog = chains_[node.chain].backlog;
            backlog.insert(backlog.begin(), std::make_move_iterator(node.mempool.begin()),
                           std::make_move_iterator(node.mempool.end()));
            node.mempool.clear();
        }
        if (r.commit_index() > before.commit) {
            if (is_leader) check_commit_quorum(node, before.commit);
            apply_commits(node);
        }
        schedule_wakeup(node, now());
    }

    void on_elected(NodeState& node) {
        auto& chain = chains_[node.chain];
        const auto term = node.raft->current_term();
        auto [it, inserted] = chain.leader_of_term.emplace(term, node.id);
        if (!inserted && it->second != node.id) {
            violation("election_safety", "chain " + std::to_string(node.chain) + " term " + std::to_string(term) +
                                             " has leaders " + std::to_string(it->second) + " and " +
                                             std::to_string(node.id));
        }
        trace_.chains[node.chain].leaders.emplace_back(term, node.id);
    }

    void check_commit_quorum(const NodeState& node, raft::LogIndex previous) {
        const auto& r = *node.raft;
        for (raft::LogIndex idx = previous + 1; idx <= r.commit_index(); ++idx) {
            std::size_t acks = 1;
            for (const auto& [peer, match] : r.match_index()) {
                if (match >= idx) ++acks;
            }
            if (acks < raft::quorum_threshold(r.cluster().size())) {
                violation("commit_quorum", "index " + std::to_string(idx) + " committed with " +
                                               std::to_string(acks) + " acknowledgements");
            }
        }
    }

    void apply_commits(NodeState& node) {
        auto& chain = chains_[node.chain];
        const auto& r = *node.raft;
        const bool is_leader = r.role() == raft::Role::Leader;
        while (node.applied < r.commit_index()) {
            const raft::LogIndex idx = node.applied + 1;
            const auto& entry = r.log()[idx - 1];
            ordering::BlockPtr block;
            if (idx <= chain.committed.size()) {
                const auto& record = chain.committed[idx - 1];
                if (!(record.command == entry.command)) {
                    violation("state_machine_safety", "chain " + std::to_string(node.chain) + " index " +
                                                          std::to_string(idx) + " committed twice with different commands");
                    return;
                }
                block = record.block;
            } else {
                try {
                    block = std::make_shared<const Block>(decode_block(entry.command.view()));
                    const BlockHeader* parent =
                        chain.committed.empty() ? &chain.genesis->header : &chain.committed.back().block->header;
                    check_successor(node.chain, parent, *block);
                } catch (const Error& e) {
                    violation("rank_discipline", "chain " + std::to_string(node.chain) + " index " +
                                                     std::to_string(idx) + ": " + e.what());
                    return;
                }
                ++trace_.blocks_checked;
                chain.committed.push_back({entry.command, block, now()});
            }
            node.applied = idx;
            append_to_view(node, block);
            if (is_leader) {
                for (NodeId to = 0; to < config_.nodes; ++to) {
                    if (nodes_[to].chain != node.chain) send(node.id, to, BlockGossip{block}, "BlockGossip");
                }
            }
        }
        check_log_matching(node);
    }

    void check_log_matching(const NodeState& node) {
        const auto& a = *node.raft;
        for (NodeId peer : chains_[node.chain].committee) {
            if (peer == node.id) continue;
            const auto& b = *nodes_[peer].raft;
            ++trace_.log_matching_checks;
            const raft::LogIndex common = std::min(a.last_log_index(), b.last_log_index());
            for (raft::LogIndex i = 1; i <= common; ++i) {
                if (a.term_at(i) != b.term_at(i)) continue;
                bool same = a.log()[i - 1].command == b.log()[i - 1].command &&
                            (i == 1 || a.term_at(i - 1) == b.term_at(i - 1));
                if (!same) {
                    violation("log_matching", "nodes " + std::to_string(node.id) + " and " + std::to_string(peer) +
                                                  " diverge below index " + std::to_string(i));
                    return;
                }
            }
        }
    }

    NodeState* find_leader(ChainId chain) {
        NodeState* best = nullptr;
        for (NodeId id : chains_[chain].committee) {
            auto& n = nodes_[id];
            if (n.crashed || n.raft->role() != raft::Role::Leader) continue;
            if (best == nullptr || n.raft->current_term() > best->raft->current_term()) best = &n;
        }
        return best;
    }

    void maybe_propose(NodeState& node) {
        auto& r = *node.raft;
        if (r.role() != raft::Role::Leader) return;
        auto& chain = chains_[node.chain];
        node.mempool.insert(node.mempool.begin(), std::make_move_iterator(chain.backlog.begin()),
                            std::make_move_iterator(chain.backlog.end()));
        chain.backlog.clear();
        const bool producing = now() < config_.run_duration;
        // The second half of the drain window carries no proposals so commits and gossip settle.
        if (!producing && now() >= config_.run_duration + config_.drain_duration / 2) return;
        const bool stale_tail = r.last_log_index() > r.commit_index() && r.last_log_term() != r.current_term();
        const bool propose = producing ? (!node.mempool.empty() || config_.empty_blocks)
                                       : (!node.mempool.empty() || stale_tail);
        if (!propose) return;

        BlockHeader tip = r.log().empty() ? chain.genesis->header : decode_block_header(r.log().back().command.view());
        auto fields = ordering::propose_rank_fields(node.view, node.chain, tip);
        Rank x = 0;
        for (ChainId c = 0; c < config_.chains; ++c) {
            x = std::max(x, c == node.chain ? tip.next_rank : ordering::expected_next_rank(node.view, c));
        }
        if (!(fields.next_rank > fields.rank && fields.next_rank >= x && fields.rank == tip.next_rank)) {
            violation("rank_discipline", "proposal on chain " + std::to_string(node.chain) + " breaks rank rules");
        }

        std::size_t take = node.mempool.size();
        if (config_.max_block_txs != 0) take = std::min(take, config_.max_block_txs);
        std::vector<Transaction> txs(std::make_move_iterator(node.mempool.begin()),
                                     std::make_move_iterator(node.mempool.begin() + static_cast<std::ptrdiff_t>(take)));
        node.mempool.erase(node.mempool.begin(), node.mempool.begin() + static_cast<std::ptrdiff_t>(take));

        Block block = make_child_block(tip, fields.rank, fields.next_rank, r.current_term(), std::move(txs));
        auto before = snapshot(node);
        auto out = r.client_submit(SharedBytes(encode_block(block)), now());
        after_raft(node, before, std::move(out));
    }

    // --- views and ordering ----------------------------------------------

    void on_gossip(NodeState& node, const ordering::BlockPtr& block) {
        const ChainId c = block->header.chain_id;
        const std::uint64_t height = block->header.height;
        const std::size_t known = node.view.height_known(c);
        if (height < known) {
            if (node.view.chain(c)[height].hash != hash_header(block->header)) {
                violation("gossip_conflict", "node " + std::to_string(node.id) + " saw two blocks at " +
                                                 std::to_string(c) + "/" + std::to_string(height));
            }
            return;
        }
        auto& pending = pending_gossip_[node.id][c];
        pending.emplace(height, block);
        for (auto it = pending.find(node.view.height_known(c)); it != pending.end();
             it = pending.find(node.view.height_known(c))) {
            auto next = it->second;
            pending.erase(it);
            if (!append_to_view(node, next)) break;
        }
    }

    bool append_to_view(NodeState& node, const ordering::BlockPtr& block) {
        const Rank bar = ordering::confirm_bar(node.view);
        if (block->header.rank < bar) {
            violation("confirm_bar_floor", "block " + std::to_string(block->header.chain_id) + "/" +
                                               std::to_string(block->header.height) + " has rank below ConfirmBar");
        }
        try {
            node.view.append(block);
        } catch (const Error& e) {
            violation("view_linkage", "node " + std::to_string(node.id) + ": " + e.what());
            return false;
        }
        node.view.observed_at = now();
        trace_.view_log[node.id].push_back({now(), block});
        advance_confirmed(node);
        return true;
    }

    // Extends the node's confirmed order after a view change and checks every
    // new position against the order other nodes have already confirmed.
    void advance_confirmed(NodeState& node) {
        const Rank bar = ordering::confirm_bar(node.view);
        if (bar <= node.bar) return;
        node.bar = bar;
        std::vector<const ordering::ViewEntry*> fresh;
        for (ChainId c = 0; c < config_.chains; ++c) {
            const auto& list = node.view.chain(c);
            auto& cursor = node.cursor[c];
            while (cursor < list.size() && list[cursor].block->header.rank < bar) fresh.push_back(&list[cursor++]);
        }
        std::sort(fresh.begin(), fresh.end(), [](const auto* a, const auto* b) {
            const auto& ha = a->block->header;
            const auto& hb = b->block->header;
            return ha.rank != hb.rank ? ha.rank < hb.rank : ha.chain_id < hb.chain_id;
        });
        for (const auto* entry : fresh) {
            const auto& h = entry->block->header;
            ordering::OrderedBlockRef ref{h.rank, h.chain_id, h.height, entry->hash};
            const std::size_t pos = node.confirmed++;
            if (pos == canonical_order_.size()) {
                canonical_order_.push_back(ref);
            } else if (!(canonical_order_[pos] == ref)) {
                violation("order_prefix", "node " + std::to_string(node.id) + " confirmed block " +
                                              std::to_string(h.chain_id) + "/" + std::to_string(h.height) +
                                              " at position " + std::to_string(pos) + " where another node has " +
                                              std::to_string(canonical_order_[pos].chain_id) + "/" +
                                              std::to_string(canonical_order_[pos].height));
            }
        }
        if (node.id == trace_.observer) observer_confirmed(bar, fresh);
    }

    void observer_confirmed(Rank bar, const std::vector<const ordering::ViewEntry*>& fresh) {
        const Tick t = started_raft_time();
        trace_.confirm_bar.push_back({t, bar});
        for (const auto* entry : fresh) {
            for (const auto& tx : entry->block->transactions) {
                auto it = submits_.find(tx.nonce);
                if (it == submits_.end()) continue;
                const auto& info = it->second;
                trace_.latencies.push_back({tx.nonce, info.chain, info.sensitive, info.time, t});
                if (info.sensitive) {
                    try {
                        auto plain = open_sensitive_transaction(keys_, tx);
                        if (sha256(plain) == info.plaintext_hash) {
                            ++trace_.sealed_verified;
                        } else {
                            violation("seal_roundtrip", "tx " + std::to_string(tx.nonce) + " decrypted to other bytes");
                        }
                    } catch (const Error& e) {
                        violation("seal_roundtrip", "tx " + std::to_string(tx.nonce) + ": " + e.what());
                    }
                }
                submits_.erase(it);
            }
        }
    }

    Tick started_raft_time() const { return std::max(now(), queue_now_hint_); }

    void check_orders(bool final) {
        ++trace_.order_checks;
        std::vector<std::vector<ordering::OrderedBlockRef>> orders(config_.nodes);
        std::size_t longest = 0;
        for (NodeId id = 0; id < config_.nodes; ++id) {
            orders[id] = ordering::total_order(nodes_[id].view);
            if (orders[id].size() > orders[longest].size()) longest = id;
        }
        for (NodeId id = 0; id < config_.nodes; ++id) {
            const auto& incremental = std::span<const ordering::OrderedBlockRef>(canonical_order_).first(
                std::min(nodes_[id].confirmed, canonical_order_.size()));
            if (orders[id].size() != nodes_[id].confirmed || !ordering::is_prefix(orders[id], incremental)) {
                violation("order_recompute", "node " + std::to_string(id) +
                                                 " total order differs from its incrementally confirmed order");
            }
            if (!ordering::is_prefix(orders[id], orders[longest])) {
                violation("order_prefix", "node " + std::to_string(id) + " order is not a prefix of node " +
                                              std::to_string(longest) + "'s");
            }
        }
        if (final) {
            trace_.final_order = orders[trace_.observer];
            if (trace_.any_expected_stall()) return;
            for (NodeId id = 0; id < config_.nodes; ++id) {
                if (nodes_[id].crashed) continue;
                if (orders[id] != orders[trace_.observer]) {
                    violation("final_order_mismatch", "node " + std::to_string(id) + " disagrees with observer " +
                                                          std::to_string(trace_.observer));
                }
            }
        }
    }

    // --- workload ----------------------------------------------------------

    void generate_workload() {
        const double whole = std::floor(config_.tx_rate);
        std::uint64_t count = static_cast<std::uint64_t>(whole);
        if (workload_.bernoulli(config_.tx_rate - whole)) ++count;
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto chain = static_cast<ChainId>(workload_.below(config_.chains));
            const bool sensitive = workload_.bernoulli(config_.sensitive_fraction);
            Bytes payload(config_.payload_bytes);
            for (std::size_t b = 0; b < payload.size(); b += 8) {
                std::uint64_t w = workload_.next_u64();
                for (std::size_t k = 0; k < 8 && b + k < payload.size(); ++k) payload[b + k] = static_cast<std::uint8_t>(w >> (8 * k));
            }
            const std::uint64_t fee = 1 + workload_.below(10);
            const std::uint64_t nonce = next_nonce_++;
            SubmitInfo info{now(), chain, sensitive, {}};
            Transaction tx;
            if (sensitive) {
                info.plaintext_hash = sha256(payload);
                tx = make_sensitive_transaction(sealer_, payload, fee, nonce);
            } else {
                tx = Transaction{std::move(payload), false, fee, nonce};
            }
            submits_.emplace(nonce, info);
            ++trace_.txs_submitted;
            queue_.push(now(), ClientSubmit{chain, std::move(tx)});
        }
    }

    // --- output ------------------------------------------------------------

    void log_delivery(const Delivery& d) {
        std::ostringstream os;
        os << now() << ',' << d.from << ',' << d.to << ',';
        if (const auto* msg = std::get_if<raft::Message>(&d.msg)) {
            os << raft::variant_name(*msg) << ',' << raft::message_term(*msg) << ',' << raft_detail(*msg);
        } else {
            const auto& h = std::get<BlockGossip>(d.msg).block->header;
            os << "BlockGossip," << h.proposer_term << ",chain=" << h.chain_id << " height=" << h.height
               << " rank=" << h.rank << " next_rank=" << h.next_rank;
        }
        trace_.trace_log.push_back(os.str());
    }

    void finalize_metrics() {
        for (ChainId c = 0; c < config_.chains; ++c) {
            auto& m = trace_.chains[c];
            for (const auto& entry : chains_[c].committed) {
                const auto txs = entry.block->transactions.size();
                ++m.committed_blocks_total;
                m.committed_txs_total += txs;
                if (entry.first_commit <= config_.run_duration) {
                    ++m.committed_blocks;
                    m.committed_txs += txs;
                }
            }
        }
    }

    SimConfig config_;
    SimTrace trace_;
    EventQueue<Payload> queue_;
    DeterministicStream delays_;
    DeterministicStream workload_;
    Sealer sealer_;
    KeyDirectory keys_;
    bool started_ = false;
    std::vector<bool> scheduled_crash_;
    std::vector<ChainState> chains_;
    std::vector<NodeState> nodes_;
    std::vector<std::map<ChainId, std::map<std::uint64_t, ordering::BlockPtr>>> pending_gossip_;
    std::map<std::uint64_t, SubmitInfo> submits_;
    std::uint64_t next_nonce_ = 0;
    std::vector<ordering::OrderedBlockRef> canonical_order_;  // longest confirmed order any node has reached
    Tick queue_now_hint_ = 0;
};

Simulation::Simulation(SimConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

void Simulation::inject_crash(Tick time, NodeId node) { impl_->inject_crash(time, node); }
void Simulation::run_until(Tick time) { impl_->run_until(time); }
Tick Simulation::now() const { return impl_->now(); }
bool Simulation::is_crashed(NodeId node) const { return impl_->is_crashed(node); }
const raft::Node* Simulation::raft_node(NodeId node) const { return impl_->raft_node(node); }
const ordering::GlobalView& Simulation::view(NodeId node) const { return impl_->view(node); }
SimTrace Simulation::finish() { return impl_->finish(); }

SimTrace run_simulation(const SimConfig& config) { return Simulation(config).finish(); }

std::vector<ScalingPoint> measure_scaling(const SimConfig& base, const std::vector<std::size_t>& chain_counts) {
    validate(base);
    if (base.nodes % base.chains != 0) {
        throw ConfigError("nodes", "base node count must be a multiple of the chain count to fix committee size");
    }
    const std::size_t committee = base.nodes / base.chains;
    const double per_chain_rate = base.tx_rate / static_cast<double>(base.chains);
    std::vector<ScalingPoint> out;
    for (std::size_t c : chain_counts) {
        if (c == 0) throw ConfigError("chains", "chain counts must be positive");
        SimConfig cfg = base;
        cfg.chains = c;
        cfg.nodes = committee * c;
        cfg.tx_rate = per_chain_rate * static_cast<double>(c);
        auto trace = run_simulation(cfg);
        out.push_back({c, cfg.nodes, trace.committed_tx_per_time(), trace.confirmed_tx_per_time(),
                       trace.violations.size()});
    }
    return out;
}

}  // namespace rvchain::sim
