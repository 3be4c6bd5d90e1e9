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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rvchain/beacon.hpp"
#include "rvchain/config.hpp"
#include "rvchain/ledger.hpp"
#include "rvchain/ordering.hpp"
#include "rvchain/reference/ordering_reference.hpp"
#include "rvchain/report.hpp"
#include "rvchain/sealing.hpp"
#include "rvchain/simnet.hpp"

namespace py = pybind11;
using namespace rvchain;

namespace {

ByteView as_view(const py::bytes& b) {
    std::string_view s = b;
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

template <class Container>
py::bytes to_py(const Container& c) {
    return py::bytes(reinterpret_cast<const char*>(c.data()), c.size());
}

MacKey to_key(const py::bytes& b) {
    auto v = as_view(b);
    if (v.size() != 32) throw py::value_error("key must be 32 bytes");
    MacKey k{};
    std::copy(v.begin(), v.end(), k.begin());
    return k;
}

// Chains given as lists of (rank, next_rank) pairs for the blocks after genesis.
ordering::GlobalView build_view(const std::vector<std::vector<std::pair<Rank, Rank>>>& chains) {
    ordering::GlobalView view(chains.size());
    for (ChainId c = 0; c < chains.size(); ++c) {
        auto tip = std::make_shared<const Block>(make_genesis(c));
        view.append(tip);
        for (const auto& [rank, next_rank] : chains[c]) {
            tip = std::make_shared<const Block>(make_child_block(tip->header, rank, next_rank, 1, {}));
            view.append(tip);
        }
    }
    return view;
}

py::list order_to_py(const std::vector<ordering::OrderedBlockRef>& order) {
    py::list out;
    for (const auto& r : order) out.append(py::make_tuple(r.rank, r.chain_id, r.height));
    return out;
}

}  // namespace

PYBIND11_MODULE(_rvchain, m) {
    m.doc() = "Python bindings for the rvchain protocol library and simulator";

    py::register_exception<Error>(m, "RvchainError");
    auto auth = py::register_exception<AuthFailure>(m, "AuthFailure", PyExc_ValueError);
    py::register_exception<sim::ConfigError>(m, "ConfigError", PyExc_ValueError);
    (void)auth;

    m.def("sha256", [](const py::bytes& data) { return to_py(sha256(as_view(data))); });
    m.def("quorum_threshold", &raft::quorum_threshold, py::arg("n"));
    m.def("repeat_probability", &beacon::repeat_probability, py::arg("l"), py::arg("n"));
    m.def("seeded_permutation", &beacon::seeded_permutation, py::arg("rnd"), py::arg("n"));
    m.def(
        "assign_chains",
        [](std::uint64_t rnd, std::size_t n, std::size_t c) { return beacon::assign_chains(rnd, n, c).committees; },
        py::arg("rnd"), py::arg("n"), py::arg("c"));
    m.def("genesis_hash", [](ChainId chain) { return to_py(hash_header(make_genesis(chain).header)); });

    py::class_<SealKey>(m, "SealKey")
        .def_property_readonly("key_id", [](const SealKey& k) { return k.key_id; })
        .def_property_readonly("key_bytes", [](const SealKey& k) { return to_py(k.key_bytes); });
    m.def(
        "make_seal_key",
        [](const py::bytes& key, std::uint32_t key_id) { return SealKey{to_key(key), key_id}; }, py::arg("key"),
        py::arg("key_id"));
    py::class_<Sealer>(m, "Sealer")
        .def(py::init<SealKey>())
        .def(
            "seal",
            [](Sealer& s, const py::bytes& plaintext, const py::bytes& ad) {
                return to_py(encode_sealed_payload(s.seal(as_view(plaintext), as_view(ad))));
            },
            py::arg("plaintext"), py::arg("associated_data") = py::bytes())
        .def_property_readonly("seals_issued", &Sealer::seals_issued);
    m.def(
        "unseal",
        [](const SealKey& key, const py::bytes& sealed, const py::bytes& ad) {
            return to_py(unseal(key, decode_sealed_payload(as_view(sealed)), as_view(ad)));
        },
        py::arg("key"), py::arg("sealed"), py::arg("associated_data") = py::bytes());

    m.def(
        "beacon_stats",
        [](std::size_t n, unsigned l, std::size_t epochs, std::uint64_t seed) {
            auto outcomes = beacon::beacon_monte_carlo(n, l, epochs, seed);
            auto s = beacon::summarize(outcomes, n, l);
            py::dict d;
            d["epochs"] = s.epochs;
            d["repeats"] = s.repeats;
            d["empirical_repeat_rate"] = s.empirical_repeat_rate;
            d["closed_form_repeat_rate"] = s.closed_form_repeat_rate;
            d["mean_certificates"] = s.mean_certificates;
            d["mean_messages"] = s.mean_messages;
            d["expected_certificates"] = s.expected_certificates;
            d["expected_messages"] = s.expected_messages;
            d["agreement_failures"] = s.agreement_failures;
            return d;
        },
        py::arg("n"), py::arg("l"), py::arg("epochs"), py::arg("seed") = 1);

    m.def(
        "total_order",
        [](const std::vector<std::vector<std::pair<Rank, Rank>>>& chains) {
            return order_to_py(ordering::total_order(build_view(chains)));
        },
        py::arg("chains"), "Total order of genesis-rooted chains given as (rank, next_rank) lists.");
    m.def(
        "reference_total_order",
        [](const std::vector<std::vector<std::pair<Rank, Rank>>>& chains) {
            return order_to_py(reference::brute_force_total_order(build_view(chains)));
        },
        py::arg("chains"));
    m.def(
        "confirm_bar",
        [](const std::vector<std::vector<std::pair<Rank, Rank>>>& chains) {
            return ordering::confirm_bar(build_view(chains));
        },
        py::arg("chains"));

    py::class_<sim::SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("seed", &sim::SimConfig::seed)
        .def_readwrite("nodes", &sim::SimConfig::nodes)
        .def_readwrite("chains", &sim::SimConfig::chains)
        .def_readwrite("beacon_bits", &sim::SimConfig::beacon_bits)
        .def_readwrite("delta", &sim::SimConfig::delta)
        .def_readwrite("raft_delay_min", &sim::SimConfig::raft_delay_min)
        .def_readwrite("raft_delay_max", &sim::SimConfig::raft_delay_max)
        .def_readwrite("election_timeout", &sim::SimConfig::election_timeout)
        .def_readwrite("heartbeat_interval", &sim::SimConfig::heartbeat_interval)
        .def_readwrite("block_interval", &sim::SimConfig::block_interval)
        .def_readwrite("tx_rate", &sim::SimConfig::tx_rate)
        .def_readwrite("sensitive_fraction", &sim::SimConfig::sensitive_fraction)
        .def_readwrite("run_duration", &sim::SimConfig::run_duration)
        .def_readwrite("drain_duration", &sim::SimConfig::drain_duration)
        .def_readwrite("sample_interval", &sim::SimConfig::sample_interval)
        .def_readwrite("max_block_txs", &sim::SimConfig::max_block_txs)
        .def_readwrite("payload_bytes", &sim::SimConfig::payload_bytes)
        .def_readwrite("empty_blocks", &sim::SimConfig::empty_blocks)
        .def_property(
            "crash_schedule",
            [](const sim::SimConfig& c) {
                std::vector<std::pair<Tick, sim::NodeId>> out;
                for (const auto& s : c.crash_schedule) out.emplace_back(s.time, s.node);
                return out;
            },
            [](sim::SimConfig& c, const std::vector<std::pair<Tick, sim::NodeId>>& v) {
                c.crash_schedule.clear();
                for (const auto& [t, n] : v) c.crash_schedule.push_back({t, n});
            })
        .def("render", [](const sim::SimConfig& c) { return sim::render_config(c); });
    m.def("parse_config", [](const std::string& text) { return sim::parse_experiment(text).config; }, py::arg("text"));

    py::class_<sim::SimTrace>(m, "SimTrace")
        .def_readonly("raft_start", &sim::SimTrace::raft_start)
        .def_readonly("txs_submitted", &sim::SimTrace::txs_submitted)
        .def_readonly("sealed_verified", &sim::SimTrace::sealed_verified)
        .def_readonly("message_counts", &sim::SimTrace::message_counts)
        .def_property_readonly("violations",
                               [](const sim::SimTrace& t) {
                                   std::vector<std::tuple<Tick, std::string, std::string>> out;
                                   for (const auto& v : t.violations) out.emplace_back(v.time, v.kind, v.detail);
                                   return out;
                               })
        .def_property_readonly("committees", [](const sim::SimTrace& t) { return t.assignment.committees; })
        .def_property_readonly("committed_txs",
                               [](const sim::SimTrace& t) {
                                   std::vector<std::uint64_t> out;
                                   for (const auto& c : t.chains) out.push_back(c.committed_txs);
                                   return out;
                               })
        .def_property_readonly("expected_stall", &sim::SimTrace::any_expected_stall)
        .def_property_readonly("final_order", [](const sim::SimTrace& t) { return order_to_py(t.final_order); })
        .def("committed_tx_per_time", &sim::SimTrace::committed_tx_per_time)
        .def("confirmed_tx_per_time", &sim::SimTrace::confirmed_tx_per_time)
        .def("throughput_csv", [](const sim::SimTrace& t) { return sim::throughput_csv(t); })
        .def("latency_csv", [](const sim::SimTrace& t) { return sim::latency_csv(t); })
        .def("summary", [](const sim::SimTrace& t) { return sim::summary_text(t, {}); })
        .def("write_outputs", [](const sim::SimTrace& t, const std::string& dir) { sim::write_run_outputs(t, dir); },
             py::arg("out_dir"));

    m.def("run_simulation", &sim::run_simulation, py::arg("config"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "measure_scaling",
        [](const sim::SimConfig& base, const std::vector<std::size_t>& counts) {
            std::vector<std::tuple<std::size_t, std::size_t, double>> out;
            for (const auto& p : sim::measure_scaling(base, counts)) {
                out.emplace_back(p.chains, p.nodes, p.committed_tx_per_time);
            }
            return out;
        },
        py::arg("base"), py::arg("chain_counts"), py::call_guard<py::gil_scoped_release>());
}
