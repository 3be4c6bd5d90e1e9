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
#include <span>
#include <variant>
#include <vector>

#include "rvchain/bytes.hpp"
#include "rvchain/crypto.hpp"
#include "rvchain/event_queue.hpp"

namespace rvchain::beacon {

using NodeId = std::uint32_t;
using Epoch = std::uint64_t;
using ChainIndex = std::uint32_t;

class EpochReplay : public Error {
public:
    using Error::Error;
};

class UnknownNode : public Error {
public:
    using Error::Error;
};

class MixedEpochs : public Error {
public:
    using Error::Error;
};

class InvalidShape : public Error {
public:
    using Error::Error;
};

/// Signed <epoch, rnd> emitted by a node's beacon when its q draw is zero.
struct Certificate {
    Epoch epoch = 0;
    std::uint64_t rnd = 0;
    NodeId node_id = 0;
    Hash32 signature{};

    bool operator==(const Certificate&) const = default;
};

// epoch (u64 BE) || rnd (u64 BE) || node_id (u32 BE): the signed message.
Bytes certificate_message(Epoch epoch, std::uint64_t rnd, NodeId node_id);
// certificate_message || tag (32B)
Bytes encode_certificate(const Certificate& cert);
Certificate decode_certificate(ByteView bytes);

/// Public directory of per-node signing keys (HMAC-SHA256 stands in for
/// attestation-backed enclave signatures).
class SigningDirectory {
public:
    void add(NodeId node, const MacKey& key) { keys_[node] = key; }
    const MacKey* find(NodeId node) const;
    std::size_t size() const { return keys_.size(); }

private:
    std::map<NodeId, MacKey> keys_;
};

/// The per-node beacon enclave: a signing key, the bit length l of q, its
/// private randomness stream and the once-per-epoch gate.
class BeaconState {
public:
    BeaconState(NodeId node_id, const MacKey& signing_key, unsigned l, DeterministicStream rng);

    NodeId node_id() const { return node_id_; }
    unsigned bits() const { return l_; }
    std::optional<Epoch> last_invoked_epoch() const { return last_invoked_; }

    /// Draws q in [0, 2^l) then rnd, in that order. Returns a certificate iff
    /// q == 0. Throws EpochReplay unless epoch > last_invoked_epoch.
    std::optional<Certificate> invoke(Epoch epoch);

private:
    NodeId node_id_;
    MacKey signing_key_;
    unsigned l_;
    DeterministicStream rng_;
    std::optional<Epoch> last_invoked_;
};

inline std::optional<Certificate> invoke_beacon(BeaconState& state, Epoch epoch) { return state.invoke(epoch); }

/// Throws UnknownNode if cert.node_id has no directory entry.
bool verify_certificate(const Certificate& cert, const SigningDirectory& directory);

struct LockedSeed {
    std::uint64_t rnd = 0;
    NodeId node_id = 0;
    bool operator==(const LockedSeed&) const = default;
};

struct Repeat {
    Epoch next_epoch = 0;
    bool operator==(const Repeat&) const = default;
};

using SeedOutcome = std::variant<LockedSeed, Repeat>;

/// Lowest rnd wins, ties to the lowest node id; no certificates means Repeat(epoch + 1).
/// Throws MixedEpochs if any certificate is not for `epoch`.
SeedOutcome select_seed(std::span<const Certificate> certs, Epoch epoch);

struct ChainAssignment {
    Epoch epoch = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<NodeId>> committees;  // committees[c] is chain c's verifier set
    std::vector<ChainIndex> chain_of;             // chain_of[node]

    std::size_t chain_count() const { return committees.size(); }
};

/// Uniform permutation of [0, n): Fisher-Yates from the top index down,
/// drawing from DeterministicStream("rvchain/shuffle", rnd) by rejection sampling.
std::vector<NodeId> seeded_permutation(std::uint64_t rnd, std::size_t n);

/// Splits seeded_permutation(rnd, n) into c contiguous chunks; the first n mod c
/// have ceil(n/c) members and the rest floor(n/c). Throws InvalidShape.
ChainAssignment assign_chains(std::uint64_t rnd, std::size_t n, std::size_t c, Epoch epoch = 0);

/// (1 - 2^-l)^n
double repeat_probability(unsigned l, std::uint64_t n);

struct EpochOutcome {
    Epoch epoch = 0;
    bool succeeded = false;
    std::size_t num_certificates = 0;
    std::uint64_t seed = 0;  // meaningful only when succeeded
    std::uint64_t messages_sent = 0;
    bool agreement = true;  // all live nodes locked the same outcome
};

/// A full membership of beacon enclaves with their public directory.
struct BeaconNetwork {
    SigningDirectory directory;
    std::vector<BeaconState> nodes;

    /// Keys and randomness streams are derived from master_seed per node.
    static BeaconNetwork create(std::size_t n, unsigned l, std::uint64_t master_seed);
};

/// One synchronous epoch. Every live node invokes its beacon at time 0;
/// certificate holders broadcast to the other n - 1 nodes with delays drawn
/// from [1, delta]; at time delta each live node verifies what it received and
/// evaluates select_seed. `alive` may be empty (everyone alive).
EpochOutcome run_beacon_epoch(BeaconNetwork& network, Epoch epoch, Tick delta, DeterministicStream& delays,
                              std::span<const bool> alive = {});

/// Runs consecutive epochs starting at `first` until one succeeds or
/// max_epochs have been tried. Returns every epoch's outcome.
std::vector<EpochOutcome> run_until_seed(BeaconNetwork& network, Epoch first, Tick delta,
                                         DeterministicStream& delays, std::span<const bool> alive = {},
                                         std::size_t max_epochs = 1000);

struct MonteCarloSummary {
    std::size_t epochs = 0;
    std::size_t repeats = 0;
    double empirical_repeat_rate = 0;
    double closed_form_repeat_rate = 0;
    double mean_certificates = 0;             // over all epochs
    double mean_messages = 0;                 // over all epochs
    double mean_certificates_successful = 0;  // over successful epochs only
    double mean_messages_successful = 0;
    double expected_certificates = 0;         // n * 2^-l
    double expected_messages = 0;             // 2^-l * n * (n - 1)
    double expected_certificates_successful = 0;  // n 2^-l / (1 - P_repeat)
    double expected_messages_successful = 0;      // (n - 1) times the above
    std::size_t agreement_failures = 0;
};

/// Runs `epochs` independent beacon epochs (0, 1, ...) on one network.
std::vector<EpochOutcome> beacon_monte_carlo(std::size_t n, unsigned l, std::size_t epochs, std::uint64_t seed,
                                             Tick delta = 10);
MonteCarloSummary summarize(std::span<const EpochOutcome> outcomes, std::size_t n, unsigned l);

}  // namespace rvchain::beacon
