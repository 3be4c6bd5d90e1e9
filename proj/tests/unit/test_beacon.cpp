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

#include <algorithm>
#include <cmath>
#include <map>

#include "rvchain/beacon.hpp"

namespace rvchain::beacon {
namespace {

MacKey counting_key() {
    MacKey k{};
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<std::uint8_t>(i);
    return k;
}

// First seed of the test stream whose first word's top l bits equal q.
std::uint64_t seed_with_top_bits(unsigned l, std::uint64_t q) {
    for (std::uint64_t seed = 0;; ++seed) {
        DeterministicStream s("test/beacon-rng", seed);
        if ((s.next_u64() >> (64 - l)) == q) return seed;
    }
}

Certificate signed_cert(Epoch epoch, std::uint64_t rnd, NodeId node) {
    Certificate c{epoch, rnd, node, {}};
    c.signature = hmac_sha256(counting_key(), certificate_message(epoch, rnd, node));
    return c;
}

TEST(Beacon, ZeroDrawYieldsSignedCertificate) {
    const auto seed = seed_with_top_bits(6, 0);
    DeterministicStream mirror("test/beacon-rng", seed);
    mirror.next_u64();
    const auto expected_rnd = mirror.next_u64();

    BeaconState state(4, counting_key(), 6, DeterministicStream("test/beacon-rng", seed));
    auto cert = state.invoke(9);
    ASSERT_TRUE(cert.has_value());
    EXPECT_EQ(cert->epoch, 9u);
    EXPECT_EQ(cert->rnd, expected_rnd);
    EXPECT_EQ(cert->node_id, 4u);
    SigningDirectory dir;
    dir.add(4, counting_key());
    EXPECT_TRUE(verify_certificate(*cert, dir));
}

TEST(Beacon, NonZeroDrawYieldsNothing) {
    BeaconState state(0, counting_key(), 2, DeterministicStream("test/beacon-rng", seed_with_top_bits(2, 3)));
    EXPECT_FALSE(state.invoke(0).has_value());
    EXPECT_EQ(state.last_invoked_epoch(), Epoch{0});
}

TEST(Beacon, ReplayIsRejected) {
    BeaconState state(0, counting_key(), 1, DeterministicStream("test/beacon-rng", 1));
    state.invoke(5);
    EXPECT_THROW(state.invoke(5), EpochReplay);
    EXPECT_THROW(invoke_beacon(state, 4), EpochReplay);
    EXPECT_NO_THROW(state.invoke(6));
}

TEST(Beacon, ReplayAlwaysRejectedAcrossRandomHistories) {
    DeterministicStream rng("test/beacon-replay", 1);
    for (int trial = 0; trial < 200; ++trial) {
        BeaconState state(0, counting_key(), 3, DeterministicStream("test/beacon-rng", trial));
        std::vector<Epoch> used;
        Epoch e = rng.below(5);
        for (int k = 0; k < 5; ++k) {
            state.invoke(e);
            used.push_back(e);
            e += 1 + rng.below(3);
        }
        for (Epoch old : used) EXPECT_THROW(state.invoke(old), EpochReplay);
    }
}

TEST(Beacon, InvalidBitLength) {
    EXPECT_THROW(BeaconState(0, counting_key(), 0, DeterministicStream("x", 1)), std::invalid_argument);
    EXPECT_THROW(BeaconState(0, counting_key(), 65, DeterministicStream("x", 1)), std::invalid_argument);
}

TEST(Certificate, SignatureMatchesReference) {
    auto cert = signed_cert(3, 7, 2);
    EXPECT_EQ(to_hex(cert.signature), "27aea170393abbcb7a4370895514a1f56b1a293ab5ddcb661a2982b4d77f03ae");
    auto wire = encode_certificate(cert);
    EXPECT_EQ(wire.size(), 8u + 8u + 4u + 32u);
    EXPECT_EQ(decode_certificate(wire), cert);
    wire.pop_back();
    EXPECT_THROW(decode_certificate(wire), DecodeError);
}

TEST(Certificate, VerifyRejectsTamperingAndStrangers) {
    SigningDirectory dir;
    dir.add(2, counting_key());
    auto cert = signed_cert(3, 7, 2);
    EXPECT_TRUE(verify_certificate(cert, dir));
    auto bumped = cert;
    bumped.rnd += 1;
    EXPECT_FALSE(verify_certificate(bumped, dir));
    auto stranger = cert;
    stranger.node_id = 9;
    EXPECT_THROW(verify_certificate(stranger, dir), UnknownNode);
}

TEST(SelectSeed, PicksMinimum) {
    std::vector<Certificate> certs{signed_cert(1, 5, 0), signed_cert(1, 3, 1), signed_cert(1, 9, 2)};
    EXPECT_EQ(select_seed(certs, 1), SeedOutcome(LockedSeed{3, 1}));
}

TEST(SelectSeed, EmptyRepeats) { EXPECT_EQ(select_seed({}, 4), SeedOutcome(Repeat{5})); }

TEST(SelectSeed, Singleton) {
    std::vector<Certificate> certs{signed_cert(0, 7, 3)};
    EXPECT_EQ(select_seed(certs, 0), SeedOutcome(LockedSeed{7, 3}));
}

TEST(SelectSeed, TiesGoToLowestNodeAndOrderDoesNotMatter) {
    std::vector<Certificate> certs{signed_cert(0, 4, 6), signed_cert(0, 4, 2), signed_cert(0, 8, 1)};
    auto a = select_seed(certs, 0);
    std::reverse(certs.begin(), certs.end());
    EXPECT_EQ(select_seed(certs, 0), a);
    EXPECT_EQ(a, SeedOutcome(LockedSeed{4, 2}));
}

TEST(SelectSeed, MixedEpochsRejected) {
    std::vector<Certificate> certs{signed_cert(0, 4, 6), signed_cert(1, 2, 2)};
    EXPECT_THROW(select_seed(certs, 0), MixedEpochs);
}

TEST(AssignChains, EvenSplit) {
    auto a = assign_chains(99, 4, 2);
    ASSERT_EQ(a.committees.size(), 2u);
    EXPECT_EQ(a.committees[0].size(), 2u);
    EXPECT_EQ(a.committees[1].size(), 2u);
}

TEST(AssignChains, Singleton) {
    auto a = assign_chains(1, 1, 1);
    EXPECT_EQ(a.committees, (std::vector<std::vector<NodeId>>{{0}}));
    EXPECT_EQ(a.chain_of, (std::vector<ChainIndex>{0}));
}

TEST(AssignChains, MatchesReferenceShuffle) {
    EXPECT_EQ(seeded_permutation(12345, 5), (std::vector<NodeId>{1, 3, 0, 2, 4}));
    auto a = assign_chains(12345, 5, 2, 3);
    EXPECT_EQ(a.committees, (std::vector<std::vector<NodeId>>{{1, 3, 0}, {2, 4}}));
    EXPECT_EQ(a.chain_of, (std::vector<ChainIndex>{0, 0, 1, 0, 1}));
    EXPECT_EQ(a.epoch, 3u);
    EXPECT_EQ(a.seed, 12345u);
}

TEST(AssignChains, InvalidShapes) {
    EXPECT_THROW(assign_chains(1, 3, 4), InvalidShape);
    EXPECT_THROW(assign_chains(1, 0, 1), InvalidShape);
    EXPECT_THROW(assign_chains(1, 3, 0), InvalidShape);
}

TEST(AssignChains, BalancedPartitionForAllShapes) {
    for (std::size_t n = 1; n <= 40; ++n) {
        for (std::size_t c = 1; c <= n; ++c) {
            auto a = assign_chains(n * 1000 + c, n, c);
            std::size_t lo = n, hi = 0, total = 0;
            std::vector<int> seen(n, 0);
            for (std::size_t k = 0; k < c; ++k) {
                lo = std::min(lo, a.committees[k].size());
                hi = std::max(hi, a.committees[k].size());
                total += a.committees[k].size();
                for (auto id : a.committees[k]) {
                    seen[id]++;
                    EXPECT_EQ(a.chain_of[id], k);
                }
            }
            EXPECT_LE(hi - lo, 1u);
            EXPECT_EQ(total, n);
            EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
        }
    }
}

TEST(AssignChains, PermutationsAreUniform) {
    const int seeds = 50000;
    std::map<std::vector<NodeId>, int> counts;
    for (int s = 0; s < seeds; ++s) counts[seeded_permutation(static_cast<std::uint64_t>(s), 6)]++;
    ASSERT_EQ(counts.size(), 720u);
    const double expected = seeds / 720.0;
    const double sd = std::sqrt(expected * (1.0 - 1.0 / 720.0));
    double chi2 = 0;
    for (const auto& [perm, c] : counts) {
        EXPECT_LE(std::abs(c - expected), 5 * sd);
        chi2 += (c - expected) * (c - expected) / expected;
    }
    // 719 degrees of freedom: mean 719, standard deviation sqrt(2 * 719).
    EXPECT_LT(chi2, 719 + 5 * std::sqrt(2.0 * 719));
}

TEST(RepeatProbability, ClosedForm) {
    EXPECT_NEAR(repeat_probability(6, 64), 0.36498652424390743, 1e-12);
    EXPECT_NEAR(repeat_probability(7, 128), 0.3664377159220373, 1e-12);
    EXPECT_NEAR(repeat_probability(7, 128), std::exp(-1.0), 0.002);
    EXPECT_DOUBLE_EQ(repeat_probability(1, 1), 0.5);
    EXPECT_LT(repeat_probability(2, 1000), 1e-100);
    EXPECT_THROW(repeat_probability(0, 1), std::invalid_argument);
}

// Finds a network whose first epoch produces exactly `certs` certificates.
BeaconNetwork network_with_certificates(std::size_t n, unsigned l, std::size_t certs) {
    for (std::uint64_t seed = 0;; ++seed) {
        auto probe = BeaconNetwork::create(n, l, seed);
        std::size_t count = 0;
        for (auto& node : probe.nodes) count += node.invoke(0).has_value() ? 1 : 0;
        if (count == certs) return BeaconNetwork::create(n, l, seed);
    }
}

TEST(BeaconEpoch, SingleCertificateIsAgreedOn) {
    auto net = network_with_certificates(3, 2, 1);
    DeterministicStream delays("test/delays", 1);
    auto out = run_beacon_epoch(net, 0, 10, delays);
    EXPECT_TRUE(out.succeeded);
    EXPECT_TRUE(out.agreement);
    EXPECT_EQ(out.num_certificates, 1u);
    EXPECT_EQ(out.messages_sent, 2u);
}

TEST(BeaconEpoch, NoCertificateRepeats) {
    auto net = network_with_certificates(3, 3, 0);
    DeterministicStream delays("test/delays", 1);
    auto out = run_beacon_epoch(net, 0, 10, delays);
    EXPECT_FALSE(out.succeeded);
    EXPECT_TRUE(out.agreement);
    EXPECT_EQ(out.messages_sent, 0u);
}

TEST(BeaconEpoch, CrashedNodesDoNotParticipate) {
    auto net = network_with_certificates(4, 1, 4);
    DeterministicStream delays("test/delays", 1);
    const bool alive[] = {true, false, true, true};
    auto out = run_beacon_epoch(net, 0, 10, delays, alive);
    EXPECT_EQ(out.num_certificates, 3u);
    EXPECT_EQ(out.messages_sent, 9u);
    EXPECT_TRUE(out.agreement);
    EXPECT_FALSE(net.nodes[1].last_invoked_epoch().has_value());
}

TEST(BeaconEpoch, RunUntilSeedStopsAtFirstSuccess) {
    auto net = BeaconNetwork::create(8, 5, 3);
    DeterministicStream delays("test/delays", 1);
    auto outcomes = run_until_seed(net, 0, 10, delays);
    ASSERT_FALSE(outcomes.empty());
    EXPECT_TRUE(outcomes.back().succeeded);
    for (std::size_t i = 0; i + 1 < outcomes.size(); ++i) EXPECT_FALSE(outcomes[i].succeeded);
    for (std::size_t i = 0; i < outcomes.size(); ++i) EXPECT_EQ(outcomes[i].epoch, i);
}

TEST(BeaconMonteCarlo, SingleCoin) {
    auto outcomes = beacon_monte_carlo(1, 1, 20000, 5);
    auto s = summarize(outcomes, 1, 1);
    EXPECT_NEAR(s.empirical_repeat_rate, 0.5, 0.02);
    EXPECT_EQ(s.agreement_failures, 0u);
    EXPECT_DOUBLE_EQ(s.expected_messages, 0.0);
}

TEST(BeaconMonteCarlo, SummaryExpectations) {
    auto outcomes = beacon_monte_carlo(16, 3, 4000, 2);
    auto s = summarize(outcomes, 16, 3);
    EXPECT_DOUBLE_EQ(s.expected_certificates, 2.0);
    EXPECT_DOUBLE_EQ(s.expected_messages, 30.0);
    EXPECT_NEAR(s.empirical_repeat_rate, s.closed_form_repeat_rate, 0.03);
    EXPECT_NEAR(s.mean_certificates, 2.0, 0.15);
    EXPECT_NEAR(s.mean_messages, 30.0, 2.25);
    EXPECT_EQ(s.agreement_failures, 0u);
}

TEST(BeaconMonteCarlo, Deterministic) {
    auto a = beacon_monte_carlo(10, 3, 500, 9);
    auto b = beacon_monte_carlo(10, 3, 500, 9);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].seed, b[i].seed);
        EXPECT_EQ(a[i].messages_sent, b[i].messages_sent);
    }
}

}  // namespace
}  // namespace rvchain::beacon
