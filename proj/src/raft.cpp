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

#include "rvchain/raft.hpp"

#include <algorithm>
#include <stdexcept>

namespace rvchain::raft {

const char* to_string(Role role) {
    switch (role) {
        case Role::Follower: return "follower";
        case Role::Candidate: return "candidate";
        case Role::Leader: return "leader";
    }
    return "?";
}

const char* variant_name(const Message& msg) {
    static constexpr const char* names[] = {"VoteRequest", "VoteReply", "AppendEntries", "AppendReply"};
    return names[msg.index()];
}

Term message_term(const Message& msg) {
    return std::visit([](const auto& m) { return m.term; }, msg);
}

std::size_t quorum_threshold(std::size_t n) {
    if (n == 0) throw std::invalid_argument("cluster size must be at least 1");
    return n / 2 + 1;
}

Node::Node(NodeId id, std::vector<NodeId> cluster, Timing timing, DeterministicStream timer_rng, Tick now)
    : id_(id), cluster_(std::move(cluster)), timing_(timing), timer_rng_(std::move(timer_rng)) {
    if (std::find(cluster_.begin(), cluster_.end(), id_) == cluster_.end()) {
        throw std::invalid_argument("node must be a member of its own cluster");
    }
    if (timing_.election_timeout == 0 || timing_.heartbeat_interval == 0) {
        throw std::invalid_argument("timeouts must be positive");
    }
    reset_election_deadline(now);
}

Term Node::term_at(LogIndex index) const {
    if (index == 0 || index > log_.size()) return 0;
    return log_[index - 1].term;
}

Tick Node::next_deadline() const {
    return role_ == Role::Leader ? heartbeat_deadline_ : election_deadline_;
}

void Node::reset_election_deadline(Tick now) {
    election_deadline_ = now + timer_rng_.between(timing_.election_timeout, 2 * timing_.election_timeout - 1);
}

void Node::become_follower(Term term) {
    if (term > current_term_) {
        current_term_ = term;
        voted_for_.reset();
        leader_hint_.reset();
    }
    role_ = Role::Follower;
    next_index_.clear();
    match_index_.clear();
    votes_.clear();
}

Outbox Node::handle_election_timeout(Tick now) {
    Outbox out;
    if (role_ == Role::Leader) return out;
    ++current_term_;
    role_ = Role::Candidate;
    voted_for_ = id_;
    leader_hint_.reset();
    votes_ = {id_};
    reset_election_deadline(now);
    if (votes_.size() >= majority()) {
        become_leader(now, out);
        return out;
    }
    VoteRequest req{current_term_, id_, last_log_index(), last_log_term()};
    for (NodeId peer : cluster_) {
        if (peer != id_) out.push_back({id_, peer, req});
    }
    return out;
}

VoteReply Node::handle_vote_request(const VoteRequest& msg, Tick now) {
    if (msg.term > current_term_) become_follower(msg.term);
    if (msg.term < current_term_) return {current_term_, false};

    bool can_vote = !voted_for_ || *voted_for_ == msg.candidate_id;
    bool up_to_date = msg.last_log_term > last_log_term() ||
                      (msg.last_log_term == last_log_term() && msg.last_log_index >= last_log_index());
    if (can_vote && up_to_date) {
        voted_for_ = msg.candidate_id;
        reset_election_deadline(now);
        return {current_term_, true};
    }
    return {current_term_, false};
}

void Node::become_leader(Tick now, Outbox& out) {
    role_ = Role::Leader;
    leader_hint_ = id_;
    next_index_.clear();
    match_index_.clear();
    for (NodeId peer : cluster_) {
        if (peer == id_) continue;
        next_index_[peer] = last_log_index() + 1;
        match_index_[peer] = 0;
    }
    broadcast_heartbeats(out);
    heartbeat_deadline_ = now + timing_.heartbeat_interval;
}

Outbox Node::handle_vote_reply(NodeId from, const VoteReply& msg, Tick now) {
    Outbox out;
    if (msg.term > current_term_) {
        become_follower(msg.term);
        return out;
    }
    if (role_ != Role::Candidate || msg.term != current_term_ || !msg.granted) return out;
    if (std::find(cluster_.begin(), cluster_.end(), from) == cluster_.end()) return out;
    votes_.insert(from);
    if (votes_.size() >= majority()) become_leader(now, out);
    return out;
}

AppendEntries Node::append_for(NodeId peer) const {
    LogIndex next = next_index_.at(peer);
    AppendEntries msg;
    msg.term = current_term_;
    msg.leader_id = id_;
    msg.prev_log_index = next - 1;
    msg.prev_log_term = term_at(next - 1);
    msg.entries.assign(log_.begin() + static_cast<std::ptrdiff_t>(next - 1), log_.end());
    msg.leader_commit = commit_index_;
    return msg;
}

void Node::broadcast_heartbeats(Outbox& out) const {
    for (const auto& [peer, next] : next_index_) {
        AppendEntries hb;
        hb.term = current_term_;
        hb.leader_id = id_;
        hb.prev_log_index = next - 1;
        hb.prev_log_term = term_at(next - 1);
        hb.leader_commit = commit_index_;
        out.push_back({id_, peer, std::move(hb)});
    }
}

Outbox Node::client_submit(SharedBytes command, Tick /*now*/) {
    if (role_ != Role::Leader) throw NotLeader("node " + std::to_string(id_) + " is not the leader");
    LogIndex prev_index = last_log_index();
    Term prev_term = last_log_term();
    log_.push_back(LogEntry{current_term_, prev_index + 1, std::move(command)});
    advance_commit();

    Outbox out;
    for (const auto& [peer, next] : next_index_) {
        AppendEntries msg;
        msg.term = current_term_;
        msg.leader_id = id_;
        msg.prev_log_index = prev_index;
        msg.prev_log_term = prev_term;
        msg.entries.push_back(log_.back());
        msg.leader_commit = commit_index_;
        out.push_back({id_, peer, std::move(msg)});
    }
    return out;
}

AppendReply Node::handle_append_entries(const AppendEntries& msg, Tick now) {
    if (msg.term < current_term_) return {current_term_, false, 0};
    become_follower(msg.term);
    leader_hint_ = msg.leader_id;
    reset_election_deadline(now);

    if (msg.prev_log_index > last_log_index() || term_at(msg.prev_log_index) != msg.prev_log_term) {
        return {current_term_, false, 0};
    }
    for (const auto& entry : msg.entries) {
        if (entry.index <= last_log_index()) {
            if (term_at(entry.index) == entry.term) continue;
            log_.resize(entry.index - 1);
        }
        log_.push_back(entry);
    }
    LogIndex last_new = msg.prev_log_index + msg.entries.size();
    if (msg.leader_commit > commit_index_) commit_index_ = std::max(commit_index_, std::min(msg.leader_commit, last_new));
    return {current_term_, true, last_new};
}

void Node::advance_commit() {
    for (LogIndex n = last_log_index(); n > commit_index_; --n) {
        if (term_at(n) != current_term_) break;
        std::size_t acks = 1;  // the leader's own log
        for (const auto& [peer, match] : match_index_) {
            if (match >= n) ++acks;
        }
        if (acks >= majority()) {
            commit_index_ = n;
            return;
        }
    }
}

Outbox Node::handle_append_reply(NodeId from, const AppendReply& msg, Tick /*now*/) {
    Outbox out;
    if (msg.term > current_term_) {
        become_follower(msg.term);
        return out;
    }
    if (role_ != Role::Leader || msg.term != current_term_ || !next_index_.contains(from)) return out;

    if (msg.success) {
        LogIndex& match = match_index_[from];
        if (msg.match_index > match) match = std::min(msg.match_index, last_log_index());
        next_index_[from] = std::max(next_index_[from], match + 1);
        advance_commit();
        return out;
    }
    LogIndex& next = next_index_[from];
    if (next > match_index_[from] + 1) --next;
    out.push_back({id_, from, append_for(from)});
    return out;
}

Outbox Node::tick(Tick now) {
    Outbox out;
    if (role_ == Role::Leader) {
        if (now >= heartbeat_deadline_) {
            broadcast_heartbeats(out);
            heartbeat_deadline_ = now + timing_.heartbeat_interval;
        }
        return out;
    }
    if (now >= election_deadline_) return handle_election_timeout(now);
    return out;
}

Outbox Node::receive(NodeId from, const Message& msg, Tick now) {
    return std::visit(
        [&](const auto& m) -> Outbox {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, VoteRequest>) {
                return {Envelope{id_, from, handle_vote_request(m, now)}};
            } else if constexpr (std::is_same_v<T, VoteReply>) {
                return handle_vote_reply(from, m, now);
            } else if constexpr (std::is_same_v<T, AppendEntries>) {
                return {Envelope{id_, from, handle_append_entries(m, now)}};
            } else {
                return handle_append_reply(from, m, now);
            }
        },
        msg);
}

}  // namespace rvchain::raft
