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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "rvchain/config.hpp"
#include "rvchain/ordering.hpp"
#include "rvchain/reference/ordering_reference.hpp"
#include "rvchain/report.hpp"

namespace rvchain::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kOracleMaxChains = 4;
constexpr std::size_t kOracleMaxBlocks = 6;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& path, std::size_t columns) {
    std::istringstream in(sim::read_text_file(path));
    std::string line;
    std::vector<std::vector<std::string>> rows;
    if (!std::getline(in, line)) throw Error(path.string() + ": missing header");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto row = split_csv_line(line);
        if (row.size() != columns) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                        " fields");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::uint64_t to_u64(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        auto v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(where + ": bad integer '" + s + "'");
    }
}

Hash32 to_hash(const std::string& s, const std::string& where) {
    Bytes raw = from_hex(s);
    if (raw.size() != 32) throw Error(where + ": expected a 32-byte hash");
    Hash32 h{};
    std::copy(raw.begin(), raw.end(), h.begin());
    return h;
}

std::string describe(const std::vector<ordering::OrderedBlockRef>& order, std::size_t from) {
    std::ostringstream os;
    os << "[";
    const std::size_t start = from > 2 ? from - 2 : 0;
    if (start > 0) os << "... ";
    for (std::size_t i = start; i < order.size() && i < from + 3; ++i) {
        if (i > start) os << ' ';
        os << "(rank " << order[i].rank << " chain " << order[i].chain_id << " height " << order[i].height << ")";
    }
    if (order.size() > from + 3) os << " ...";
    os << "] length " << order.size();
    return os.str();
}

std::size_t first_difference(const std::vector<ordering::OrderedBlockRef>& a,
                             const std::vector<ordering::OrderedBlockRef>& b) {
    std::size_t i = 0;
    while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
    return i;
}

struct RecordedNode {
    std::size_t id = 0;
    bool crashed = false;
    std::vector<std::pair<Tick, ordering::BlockPtr>> arrivals;
    std::vector<Hash32> recorded_hash;
    std::map<Hash32, std::uint64_t> tx_count;
};

sim::SimConfig apply_overrides(sim::SimConfig config, std::optional<std::uint64_t> seed, bool trace) {
    if (seed) config.seed = *seed;
    if (trace) config.trace = true;
    return config;
}

}  // namespace

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
    sim::ExperimentSpec spec;
    sim::SimTrace trace;
    fs::path out_dir;
    try {
        spec = sim::load_experiment(options.config_path);
        spec.config = apply_overrides(spec.config, options.seed, options.trace);
        out_dir = options.out_dir.empty() ? fs::path(spec.out_dir) : options.out_dir;
        if (out_dir.empty()) throw sim::ConfigError("out_dir", "no output directory given");
        sim::validate(spec.config);
        trace = sim::run_simulation(spec.config);
    } catch (const sim::ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    sim::write_run_outputs(trace, out_dir, spec.defaulted);
    out << sim::summary_text(trace, spec.defaulted);
    if (!trace.violations.empty()) {
        for (const auto& v : trace.violations) err << "violation at " << v.time << ": " << v.kind << ": " << v.detail << "\n";
        return kExitViolation;
    }
    return kExitOk;
}

int cmd_beacon_stats(const BeaconStatsOptions& o, std::ostream& out, std::ostream& err) {
    if (o.epochs == 0 || o.nodes == 0 || o.bits < 1 || o.bits > 64 || o.delta == 0 || o.out_dir.empty()) {
        err << "invalid parameters: need epochs >= 1, nodes >= 1, bits in [1, 64], delta >= 1 and --out\n";
        return kExitUsage;
    }
    auto outcomes = beacon::beacon_monte_carlo(o.nodes, o.bits, o.epochs, o.seed, o.delta);
    auto s = beacon::summarize(outcomes, o.nodes, o.bits);
    fs::create_directories(o.out_dir);
    sim::write_text_file(o.out_dir / "beacon.csv", sim::beacon_csv(outcomes));

    std::ostringstream os;
    using sim::format_double;
    os << "beacon Monte Carlo: nodes " << o.nodes << ", bits " << o.bits << ", epochs " << o.epochs << ", seed "
       << o.seed << "\n";
    os << "empirical repeat rate: " << format_double(s.empirical_repeat_rate) << "\n";
    os << "closed-form repeat rate: " << format_double(s.closed_form_repeat_rate) << "\n";
    os << "mean certificates per epoch: " << format_double(s.mean_certificates) << " (expected "
       << format_double(s.expected_certificates) << ")\n";
    os << "mean messages per epoch: " << format_double(s.mean_messages) << " (expected 2^-l N (N-1) = "
       << format_double(s.expected_messages) << ")\n";
    os << "mean certificates per successful epoch: " << format_double(s.mean_certificates_successful)
       << " (expected " << format_double(s.expected_certificates_successful) << ")\n";
    os << "mean messages per successful epoch: " << format_double(s.mean_messages_successful) << "\n";
    os << "agreement failures: " << s.agreement_failures << "\n";
    sim::write_text_file(o.out_dir / "summary.txt", os.str());
    out << os.str();
    return s.agreement_failures == 0 ? kExitOk : kExitViolation;
}

ScalingSummary summarize_scaling(const std::vector<sim::ScalingPoint>& points) {
    ScalingSummary s;
    double num = 0;
    double den = 0;
    for (const auto& p : points) {
        num += static_cast<double>(p.chains) * p.committed_tx_per_time;
        den += static_cast<double>(p.chains) * static_cast<double>(p.chains);
    }
    s.slope = den > 0 ? num / den : 0;
    double baseline = 0;
    for (const auto& p : points) {
        if (p.chains == 1) baseline = p.committed_tx_per_time;
    }
    for (const auto& p : points) {
        const double expected = baseline * static_cast<double>(p.chains);
        s.deviation.push_back(expected > 0 ? (p.committed_tx_per_time - expected) / expected : NAN);
    }
    return s;
}

int cmd_scale(const ScaleOptions& o, std::ostream& out, std::ostream& err) {
    std::vector<sim::ScalingPoint> points;
    fs::path out_dir;
    try {
        auto spec = sim::load_experiment(o.config_path);
        spec.config = apply_overrides(spec.config, o.seed, false);
        auto counts = o.chains.empty() ? spec.chain_counts : sim::parse_chain_list(o.chains);
        out_dir = o.out_dir.empty() ? fs::path(spec.out_dir) : o.out_dir;
        if (out_dir.empty()) throw sim::ConfigError("out_dir", "no output directory given");
        points = sim::measure_scaling(spec.config, counts);
    } catch (const sim::ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    auto summary = summarize_scaling(points);
    using sim::format_double;
    std::ostringstream csv;
    csv << "chains,nodes,committed_tx_per_time,confirmed_tx_per_time,deviation_from_linear,violations\n";
    std::ostringstream os;
    os << "scaling: committee size held fixed, per-chain offered load held fixed\n";
    os << "linear fit slope (tx per tick per chain): " << format_double(summary.slope) << "\n";
    std::size_t violations = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        const auto dev = summary.deviation[i];
        csv << p.chains << ',' << p.nodes << ',' << format_double(p.committed_tx_per_time) << ','
            << format_double(p.confirmed_tx_per_time) << ',' << (std::isnan(dev) ? "" : format_double(dev)) << ','
            << p.violations << '\n';
        os << "C=" << p.chains << " N=" << p.nodes << " throughput " << format_double(p.committed_tx_per_time)
           << " deviation " << (std::isnan(dev) ? std::string("n/a (no C=1 baseline)") : format_double(dev * 100, 2) + "%")
           << "\n";
        violations += p.violations;
    }
    os << "safety flags: " << violations << "\n";
    fs::create_directories(out_dir);
    sim::write_text_file(out_dir / "scaling.csv", csv.str());
    sim::write_text_file(out_dir / "summary.txt", os.str());
    out << os.str();
    if (violations > 0) {
        err << "safety violations during scaling runs\n";
        return kExitViolation;
    }
    return kExitOk;
}

OrderCheckReport verify_recorded_views(const fs::path& trace_dir) {
    fs::path views = trace_dir / "views";
    if (!fs::exists(views / "manifest.csv")) views = trace_dir;
    if (!fs::exists(views / "manifest.csv")) throw Error("no views/manifest.csv under " + trace_dir.string());

    Tick sample_interval = 100;
    if (fs::exists(trace_dir / "config.txt")) {
        auto spec = sim::load_experiment(trace_dir / "config.txt");
        sample_interval = spec.config.sample_interval;
    }

    bool stall = false;
    std::vector<RecordedNode> nodes;
    std::size_t chain_count = 0;
    for (const auto& row : read_csv_rows(views / "manifest.csv", 5)) {
        RecordedNode n;
        n.id = to_u64(row[0], "manifest");
        n.crashed = !row[2].empty();
        stall = stall || row[3] == "1";
        const fs::path file = views / ("node_" + std::to_string(n.id) + ".csv");
        const std::string where = file.filename().string();
        for (const auto& r : read_csv_rows(file, 10)) {
            BlockHeader h;
            h.chain_id = static_cast<ChainId>(to_u64(r[1], where));
            h.height = to_u64(r[2], where);
            h.parent_hash = to_hash(r[3], where);
            h.rank = to_u64(r[4], where);
            h.next_rank = to_u64(r[5], where);
            h.tx_root = to_hash(r[6], where);
            h.proposer_term = to_u64(r[7], where);
            chain_count = std::max<std::size_t>(chain_count, h.chain_id + 1);
            auto block = std::make_shared<Block>();
            block->header = h;
            n.arrivals.emplace_back(to_u64(r[0], where), std::move(block));
            n.recorded_hash.push_back(to_hash(r[8], where));
            n.tx_count[n.recorded_hash.back()] = to_u64(r[9], where);
        }
        nodes.push_back(std::move(n));
    }
    if (nodes.empty()) throw Error("manifest lists no nodes");

    OrderCheckReport report;
    report.nodes = nodes.size();
    Tick last = 0;
    for (auto& n : nodes) {
        for (std::size_t i = 0; i < n.arrivals.size(); ++i) {
            last = std::max(last, n.arrivals[i].first);
            const auto& h = n.arrivals[i].second->header;
            if (hash_header(h) != n.recorded_hash[i]) {
                report.problems.push_back("node " + std::to_string(n.id) + ": block " + std::to_string(h.chain_id) +
                                          "/" + std::to_string(h.height) +
                                          " header fields do not match its recorded hash");
            }
        }
    }

    std::vector<Tick> times;
    for (Tick t = sample_interval; t < last; t += sample_interval) times.push_back(t);
    times.push_back(last);

    std::vector<ordering::GlobalView> live_views(nodes.size(), ordering::GlobalView(chain_count));
    std::vector<std::size_t> cursor(nodes.size(), 0);
    std::vector<bool> broken(nodes.size(), false);
    std::vector<std::vector<ordering::OrderedBlockRef>> orders(nodes.size());
    for (Tick t : times) {
        ++report.snapshots;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            auto& n = nodes[k];
            while (!broken[k] && cursor[k] < n.arrivals.size() && n.arrivals[cursor[k]].first <= t) {
                try {
                    live_views[k].append(n.arrivals[cursor[k]].second, TxRootCheck::Skip);
                } catch (const Error& e) {
                    report.problems.push_back("node " + std::to_string(n.id) + " at time " + std::to_string(t) +
                                              ": " + e.what());
                    broken[k] = true;
                }
                ++cursor[k];
            }
            bool complete = true;
            for (ChainId c = 0; c < chain_count; ++c) complete = complete && live_views[k].has_chain(c);
            // Before the beacon phase ends a view holds no genesis blocks and orders nothing.
            if (!complete) {
                orders[k].clear();
                continue;
            }
            orders[k] = ordering::total_order(live_views[k]);
            bool small = true;
            for (ChainId c = 0; c < chain_count; ++c) small = small && live_views[k].chain(c).size() <= kOracleMaxBlocks;
            if (small && chain_count <= kOracleMaxChains) {
                ++report.oracle_checks;
                if (reference::brute_force_total_order(live_views[k]) != orders[k]) {
                    report.problems.push_back("node " + std::to_string(n.id) + " at time " + std::to_string(t) +
                                              ": total order differs from the brute-force reference");
                }
            }
        }
        std::size_t longest = 0;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            if (orders[k].size() > orders[longest].size()) longest = k;
        }
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            if (ordering::is_prefix(orders[k], orders[longest])) continue;
            const auto at = first_difference(orders[k], orders[longest]);
            report.problems.push_back("time " + std::to_string(t) + ": orders of node " + std::to_string(nodes[k].id) +
                                      " and node " + std::to_string(nodes[longest].id) + " diverge at position " +
                                      std::to_string(at) + "\n  node " + std::to_string(nodes[k].id) + ": " +
                                      describe(orders[k], at) + "\n  node " + std::to_string(nodes[longest].id) +
                                      ": " + describe(orders[longest], at));
        }
    }

    for (std::size_t k = 0; k < nodes.size(); ++k) {
        std::ostringstream csv;
        csv << "position,rank,chain_id,height,block_hash,tx_count\n";
        for (std::size_t i = 0; i < orders[k].size(); ++i) {
            const auto& r = orders[k][i];
            auto it = nodes[k].tx_count.find(r.block_hash);
            csv << i << ',' << r.rank << ',' << r.chain_id << ',' << r.height << ',' << to_hex(r.block_hash) << ','
                << (it == nodes[k].tx_count.end() ? 0 : it->second) << '\n';
        }
        report.final_order_csv.emplace_back(nodes[k].id, csv.str());
    }

    if (!stall) {
        std::optional<std::size_t> ref;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            if (nodes[k].crashed) continue;
            if (!ref) {
                ref = k;
            } else if (orders[k] != orders[*ref]) {
                const auto at = first_difference(orders[k], orders[*ref]);
                report.problems.push_back("final orders of node " + std::to_string(nodes[k].id) + " and node " +
                                          std::to_string(nodes[*ref].id) + " differ at position " +
                                          std::to_string(at));
            }
        }
    }
    return report;
}

int cmd_verify_order(const fs::path& trace_dir, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    OrderCheckReport report;
    try {
        if (!fs::is_directory(trace_dir)) throw Error(trace_dir.string() + " is not a directory");
        report = verify_recorded_views(trace_dir);
    } catch (const Error& e) {
        err << "verify-order: " << e.what() << "\n";
        return kExitUsage;
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        for (const auto& [id, csv] : report.final_order_csv) {
            sim::write_text_file(out_dir / ("order_node_" + std::to_string(id) + ".csv"), csv);
        }
    }
    out << "nodes " << report.nodes << ", snapshots " << report.snapshots << ", oracle comparisons "
        << report.oracle_checks << "\n";
    if (!report.problems.empty()) {
        for (const auto& p : report.problems) err << p << "\n";
        out << "ordering violations: " << report.problems.size() << "\n";
        return kExitViolation;
    }
    out << "all views prefix-consistent\n";
    return kExitOk;
}

}  // namespace rvchain::cli
