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
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "rvchain/bytes.hpp"
#include "rvchain/crypto.hpp"

namespace rvchain::raft {

using NodeId = std::uint32_t;
using Term = std::uint64_t;
using LogIndex = std::uint64_t;
using Tick = std::uint64_t;

enum class Role { Follower, Candidate, Leader };

const char* to_string(Role role);

class NotLeader : public Error {
public:
    using Error::Error;
};

struct LogEntry {
    Term term = 0;
    LogIndex index = 0;  // 1-based
    SharedBytes command;

    bool operator==(const LogEntry&) const = default;
};

struct VoteRequest {
    Term term = 0;
    NodeId candidate_id = 0;
    LogIndex last_log_index = 0;
    Term last_log_term = 0;

    bool operator==(const VoteRequest&) const = default;
};

struct VoteReply {
    Term term = 0;
    bool granted = false;

    bool operator==(const VoteReply&) const = default;
};

// Heartbeats are AppendEntries with no entries.
struct AppendEntries {
    Term term = 0;
    NodeId leader_id = 0;
    LogIndex prev_log_index = 0;
    Term prev_log_term = 0;
    std::vector<LogEntry> entries;
    LogIndex leader_commit = 0;

    bool operator==(const AppendEntries&) const = default;
};

struct AppendReply {
    Term term = 0;
    bool success = false;
    LogIndex match_index = 0;

    bool operator==(const AppendReply&) const = default;
};

using Message = std::variant<VoteRequest, VoteReply, AppendEntries, AppendReply>;

const char* variant_name(const Message& msg);
Term message_term(const Message& msg);

struct Envelope {
    NodeId from = 0;
    NodeId to = 0;
    Message message;
};

using Outbox = std::vector<Envelope>;

/// Strict majority, floor(n / 2) + 1. Equals f + 1 with f = (n - 1) / 2 for odd n.
std::size_t quorum_threshold(std::size_t n);

struct Timing {
    Tick election_timeout = 150;  // deadlines drawn uniformly from [T, 2T)
    Tick heartbeat_interval = 30;
};

/// Raft state of one verifier on one shadow chain.
///
/// Every handler is a deterministic transition: it mutates this value and
/// returns the messages to send. There is no I/O and no clock; callers pass
/// the current simulation time. Copying a Node snapshots it completely,
/// including the stream used to randomise election deadlines.
class Node {
public:
    Node(NodeId id, std::vector<NodeId> cluster, Timing timing, DeterministicStream timer_rng, Tick now = 0);

    NodeId id() const { return id_; }
    const std::vector<NodeId>& cluster() const { return cluster_; }
    Role role() const { return role_; }
    Term current_term() const { return current_term_; }
    std::optional<NodeId> voted_for() const { return voted_for_; }
    std::optional<NodeId> leader_hint() const { return leader_hint_; }
    const std::vector<LogEntry>& log() const { return log_; }
    LogIndex last_log_index() const { return log_.size(); }
    Term last_log_term() const { return log_.empty() ? 0 : log_.back().term; }
    // 0 for index 0 (the empty prefix).
    Term term_at(LogIndex index) const;
    LogIndex commit_index() const { return commit_index_; }
    Tick election_deadline() const { return election_deadline_; }
    Tick heartbeat_deadline() const { return heartbeat_deadline_; }
    Tick next_deadline() const;
    const Timing& timing() const { return timing_; }

    // Leader bookkeeping; empty when not leader.
    const std::map<NodeId, LogIndex>& next_index() const { return next_index_; }
    const std::map<NodeId, LogIndex>& match_index() const { return match_index_; }
    const std::set<NodeId>& votes() const { return votes_; }

    /// Starts an election. A leader is unaffected and emits nothing.
    Outbox handle_election_timeout(Tick now);
    VoteReply handle_vote_request(const VoteRequest& msg, Tick now);
    Outbox handle_vote_reply(NodeId from, const VoteReply& msg, Tick now);
    /// Appends a command at (current_term, last index + 1). Throws NotLeader.
    Outbox client_submit(SharedBytes command, Tick now);
    AppendReply handle_append_entries(const AppendEntries& msg, Tick now);
    Outbox handle_append_reply(NodeId from, const AppendReply& msg, Tick now);
    Outbox tick(Tick now);

    /// Dispatches any message; replies are wrapped as envelopes to `from`.
    Outbox receive(NodeId from, const Message& msg, Tick now);

private:
    void become_follower(Term term);
    void reset_election_deadline(Tick now);
    void become_leader(Tick now, Outbox& out);
    AppendEntries append_for(NodeId peer) const;
    void broadcast_heartbeats(Outbox& out) const;
    void advance_commit();
    std::size_t majority() const { return quorum_threshold(cluster_.size()); }

    NodeId id_;
    std::vector<NodeId> cluster_;
    Timing timing_;
    DeterministicStream timer_rng_;

    Role role_ = Role::Follower;
    Term current_term_ = 0;
    std::optional<NodeId> voted_for_;
    std::optional<NodeId> leader_hint_;
    std::vector<LogEntry> log_;
    LogIndex commit_index_ = 0;

    std::map<NodeId, LogIndex> next_index_;
    std::map<NodeId, LogIndex> match_index_;
    std::set<NodeId> votes_;

    Tick election_deadline_ = 0;
    Tick heartbeat_deadline_ = 0;
};

}  // namespace rvchain::raft
