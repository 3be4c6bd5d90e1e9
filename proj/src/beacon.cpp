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

#include "rvchain/beacon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rvchain::beacon {

Bytes certificate_message(Epoch epoch, std::uint64_t rnd, NodeId node_id) {
    ByteWriter w;
    w.u64(epoch);
    w.u64(rnd);
    w.u32(node_id);
    return std::move(w).take();
}

Bytes encode_certificate(const Certificate& cert) {
    auto out = certificate_message(cert.epoch, cert.rnd, cert.node_id);
    out.insert(out.end(), cert.signature.begin(), cert.signature.end());
    return out;
}

Certificate decode_certificate(ByteView bytes) {
    ByteReader r(bytes);
    Certificate cert;
    cert.epoch = r.u64();
    cert.rnd = r.u64();
    cert.node_id = r.u32();
    cert.signature = r.fixed<32>();
    r.expect_end();
    return cert;
}

const MacKey* SigningDirectory::find(NodeId node) const {
    auto it = keys_.find(node);
    return it == keys_.end() ? nullptr : &it->second;
}

BeaconState::BeaconState(NodeId node_id, const MacKey& signing_key, unsigned l, DeterministicStream rng)
    : node_id_(node_id), signing_key_(signing_key), l_(l), rng_(std::move(rng)) {
    if (l_ < 1 || l_ > 64) throw std::invalid_argument("beacon bit length must be in [1, 64]");
}

std::optional<Certificate> BeaconState::invoke(Epoch epoch) {
    if (last_invoked_ && epoch <= *last_invoked_) {
        throw EpochReplay("beacon of node " + std::to_string(node_id_) + " already invoked for epoch " +
                          std::to_string(*last_invoked_));
    }
    last_invoked_ = epoch;
    std::uint64_t q = rng_.next_u64();
    if (l_ < 64) q >>= (64 - l_);
    std::uint64_t rnd = rng_.next_u64();
    if (q != 0) return std::nullopt;
    Certificate cert{epoch, rnd, node_id_, {}};
    cert.signature = hmac_sha256(signing_key_, certificate_message(epoch, rnd, node_id_));
    return cert;
}

bool verify_certificate(const Certificate& cert, const SigningDirectory& directory) {
    const MacKey* key = directory.find(cert.node_id);
    if (key == nullptr) throw UnknownNode("node " + std::to_string(cert.node_id) + " is not in the directory");
    return hmac_sha256_verify(*key, certificate_message(cert.epoch, cert.rnd, cert.node_id), cert.signature);
}

SeedOutcome select_seed(std::span<const Certificate> certs, Epoch epoch) {
    const Certificate* best = nullptr;
    for (const auto& cert : certs) {
        if (cert.epoch != epoch) {
            throw MixedEpochs("certificate for epoch " + std::to_string(cert.epoch) + " in epoch " +
                              std::to_string(epoch));
        }
        if (best == nullptr || cert.rnd < best->rnd || (cert.rnd == best->rnd && cert.node_id < best->node_id)) {
            best = &cert;
        }
    }
    if (best == nullptr) return Repeat{epoch + 1};
    return LockedSeed{best->rnd, best->node_id};
}

std::vector<NodeId> seeded_permutation(std::uint64_t rnd, std::size_t n) {
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), NodeId{0});
    DeterministicStream stream("rvchain/shuffle", rnd);
    for (std::size_t i = n; i-- > 1;) {
        auto j = static_cast<std::size_t>(stream.below(i + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

ChainAssignment assign_chains(std::uint64_t rnd, std::size_t n, std::size_t c, Epoch epoch) {
    if (n == 0 || c == 0 || c > n) {
        throw InvalidShape("cannot split " + std::to_string(n) + " nodes into " + std::to_string(c) + " chains");
    }
    ChainAssignment out;
    out.epoch = epoch;
    out.seed = rnd;
    out.chain_of.resize(n);
    auto perm = seeded_permutation(rnd, n);
    std::size_t pos = 0;
    for (std::size_t chain = 0; chain < c; ++chain) {
        std::size_t size = n / c + (chain < n % c ? 1 : 0);
        out.committees.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                                    perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
        for (std::size_t k = pos; k < pos + size; ++k) out.chain_of[perm[k]] = static_cast<ChainIndex>(chain);
        pos += size;
    }
    return out;
}

double repeat_probability(unsigned l, std::uint64_t n) {
    if (l < 1 || n < 1) throw std::invalid_argument("repeat_probability needs l >= 1 and n >= 1");
    return std::exp(static_cast<double>(n) * std::log1p(-std::ldexp(1.0, -static_cast<int>(l))));
}

BeaconNetwork BeaconNetwork::create(std::size_t n, unsigned l, std::uint64_t master_seed) {
    BeaconNetwork net;
    DeterministicStream keys("rvchain/beacon-keys", master_seed);
    net.nodes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto id = static_cast<NodeId>(i);
        MacKey key = keys.key32();
        net.directory.add(id, key);
        net.nodes.emplace_back(id, key, l, DeterministicStream("rvchain/beacon-rng", master_seed, id));
    }
    return net;
}

namespace {
struct CertDelivery {
    NodeId to = 0;
    Certificate cert;
};
}  // namespace

EpochOutcome run_beacon_epoch(BeaconNetwork& network, Epoch epoch, Tick delta, DeterministicStream& delays,
                              std::span<const bool> alive) {
    if (delta == 0) throw std::invalid_argument("delta must be at least one tick");
    const std::size_t n = network.nodes.size();
    auto is_alive = [&](std::size_t i) { return alive.empty() || alive[i]; };

    EpochOutcome out;
    out.epoch = epoch;
    std::vector<std::vector<Certificate>> received(n);
    EventQueue<CertDelivery> queue;

    for (std::size_t i = 0; i < n; ++i) {
        if (!is_alive(i)) continue;
        auto cert = network.nodes[i].invoke(epoch);
        if (!cert) continue;
        ++out.num_certificates;
        received[i].push_back(*cert);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            ++out.messages_sent;
            queue.push(delays.between(1, delta), CertDelivery{static_cast<NodeId>(j), *cert});
        }
    }
    while (!queue.empty()) {
        auto ev = queue.pop();
        if (ev.time > delta) throw std::logic_error("beacon message exceeded the synchrony bound");
        if (!is_alive(ev.payload.to)) continue;
        received[ev.payload.to].push_back(ev.payload.cert);
    }

    std::optional<SeedOutcome> agreed;
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_alive(i)) continue;
        std::vector<Certificate> valid;
        for (const auto& cert : received[i]) {
            if (verify_certificate(cert, network.directory)) valid.push_back(cert);
        }
        auto outcome = select_seed(valid, epoch);
        if (!agreed) {
            agreed = outcome;
        } else if (*agreed != outcome) {
            out.agreement = false;
        }
    }
    if (agreed) {
        if (auto* locked = std::get_if<LockedSeed>(&*agreed)) {
            out.succeeded = true;
            out.seed = locked->rnd;
        }
    }
    return out;
}

std::vector<EpochOutcome> run_until_seed(BeaconNetwork& network, Epoch first, Tick delta,
                                         DeterministicStream& delays, std::span<const bool> alive,
                                         std::size_t max_epochs) {
    std::vector<EpochOutcome> outcomes;
    Epoch epoch = first;
    for (std::size_t i = 0; i < max_epochs; ++i) {
        outcomes.push_back(run_beacon_epoch(network, epoch, delta, delays, alive));
        if (outcomes.back().succeeded) break;
        epoch = epoch + 1;
    }
    return outcomes;
}

std::vector<EpochOutcome> beacon_monte_carlo(std::size_t n, unsigned l, std::size_t epochs, std::uint64_t seed,
                                             Tick delta) {
    auto network = BeaconNetwork::create(n, l, seed);
    DeterministicStream delays("rvchain/beacon-delays", seed);
    std::vector<EpochOutcome> outcomes;
    outcomes.reserve(epochs);
    for (std::size_t e = 0; e < epochs; ++e) outcomes.push_back(run_beacon_epoch(network, e, delta, delays));
    return outcomes;
}

MonteCarloSummary summarize(std::span<const EpochOutcome> outcomes, std::size_t n, unsigned l) {
    MonteCarloSummary s;
    s.epochs = outcomes.size();
    double certs = 0, messages = 0, certs_ok = 0, messages_ok = 0;
    std::size_t successes = 0;
    for (const auto& o : outcomes) {
        certs += static_cast<double>(o.num_certificates);
        messages += static_cast<double>(o.messages_sent);
        if (o.succeeded) {
            ++successes;
            certs_ok += static_cast<double>(o.num_certificates);
            messages_ok += static_cast<double>(o.messages_sent);
        } else {
            ++s.repeats;
        }
        if (!o.agreement) ++s.agreement_failures;
    }
    const double p = std::ldexp(1.0, -static_cast<int>(l));
    const double nn = static_cast<double>(n);
    s.closed_form_repeat_rate = repeat_probability(l, n);
    s.expected_certificates = nn * p;
    s.expected_messages = p * nn * (nn - 1);
    s.expected_certificates_successful = nn * p / (1.0 - s.closed_form_repeat_rate);
    s.expected_messages_successful = (nn - 1) * s.expected_certificates_successful;
    if (s.epochs > 0) {
        s.empirical_repeat_rate = static_cast<double>(s.repeats) / static_cast<double>(s.epochs);
        s.mean_certificates = certs / static_cast<double>(s.epochs);
        s.mean_messages = messages / static_cast<double>(s.epochs);
    }
    if (successes > 0) {
        s.mean_certificates_successful = certs_ok / static_cast<double>(successes);
        s.mean_messages_successful = messages_ok / static_cast<double>(successes);
    }
    return s;
}

}  // namespace rvchain::beacon
