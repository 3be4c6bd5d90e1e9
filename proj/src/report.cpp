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

#include "rvchain/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rvchain/config.hpp"

namespace rvchain::sim {

std::string format_double(double value, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value);
    return buf;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string throughput_csv(const SimTrace& trace) {
    std::ostringstream os;
    os << "chain,committee_size,crashes,expected_stall,committed_blocks,committed_txs,committed_tx_per_time,"
          "committed_blocks_total,committed_txs_total\n";
    const Tick window = trace.config.run_duration > trace.raft_start ? trace.config.run_duration - trace.raft_start : 1;
    for (std::size_t c = 0; c < trace.chains.size(); ++c) {
        const auto& m = trace.chains[c];
        os << c << ',' << m.committee_size << ',' << m.crashes << ',' << (m.expected_stall ? 1 : 0) << ','
           << m.committed_blocks << ',' << m.committed_txs << ','
           << format_double(static_cast<double>(m.committed_txs) / static_cast<double>(window)) << ','
           << m.committed_blocks_total << ',' << m.committed_txs_total << '\n';
    }
    return os.str();
}

std::string latency_csv(const SimTrace& trace) {
    std::ostringstream os;
    os << "tx_nonce,chain,sensitive,submitted,confirmed,latency\n";
    for (const auto& l : trace.latencies) {
        os << l.tx_nonce << ',' << l.chain << ',' << (l.sensitive ? 1 : 0) << ',' << l.submitted << ','
           << l.confirmed << ',' << (l.confirmed - l.submitted) << '\n';
    }
    return os.str();
}

std::string confirmbar_csv(const SimTrace& trace) {
    std::ostringstream os;
    os << "time,confirm_bar\n";
    for (const auto& p : trace.confirm_bar) os << p.time << ',' << p.bar << '\n';
    return os.str();
}

std::string beacon_csv(std::span<const beacon::EpochOutcome> epochs) {
    std::ostringstream os;
    os << "epoch,succeeded,num_certificates,seed,messages_sent\n";
    for (const auto& e : epochs) {
        os << e.epoch << ',' << (e.succeeded ? 1 : 0) << ',' << e.num_certificates << ',' << e.seed << ','
           << e.messages_sent << '\n';
    }
    return os.str();
}

std::string safety_csv(const SimTrace& trace) {
    std::ostringstream os;
    os << "time,kind,detail\n";
    for (const auto& v : trace.violations) os << v.time << ',' << csv_escape(v.kind) << ',' << csv_escape(v.detail) << '\n';
    return os.str();
}

std::string messages_csv(const SimTrace& trace) {
    std::ostringstream os;
    os << "variant,count\n";
    for (const auto& [name, count] : trace.message_counts) os << name << ',' << count << '\n';
    return os.str();
}

LatencyStats latency_stats(const SimTrace& trace) {
    LatencyStats s;
    std::vector<Tick> values;
    values.reserve(trace.latencies.size());
    for (const auto& l : trace.latencies) values.push_back(l.confirmed - l.submitted);
    s.count = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    double sum = 0;
    for (auto v : values) sum += static_cast<double>(v);
    s.mean = sum / static_cast<double>(values.size());
    const std::size_t rank = (values.size() * 95 + 99) / 100;  // ceil(0.95 n)
    s.p95 = static_cast<double>(values[std::max<std::size_t>(rank, 1) - 1]);
    return s;
}

std::string summary_text(const SimTrace& trace, const std::vector<std::string>& defaulted) {
    std::ostringstream os;
    const auto& cfg = trace.config;
    os << "rvchain simulation summary\n";
    os << "nodes " << cfg.nodes << ", chains " << cfg.chains << ", seed " << cfg.seed << "\n";
    if (!defaulted.empty()) {
        os << "defaults used:";
        for (const auto& key : defaulted) os << ' ' << key;
        os << "\n";
    }
    os << "\n[beacon]\n";
    std::uint64_t beacon_messages = 0;
    for (const auto& e : trace.beacon_epochs) beacon_messages += e.messages_sent;
    os << "epochs attempted: " << trace.beacon_epochs.size() << "\n";
    os << "epochs succeeded: " << (trace.beacon_epochs.empty() || !trace.beacon_epochs.back().succeeded ? 0 : 1)
       << "\n";
    os << "certificate messages: " << beacon_messages << "\n";
    if (!trace.beacon_epochs.empty()) os << "locked seed: " << trace.beacon_epochs.back().seed << "\n";
    os << "closed-form repeat probability: "
       << format_double(beacon::repeat_probability(cfg.beacon_bits, cfg.nodes)) << "\n";
    os << "raft phase starts at: " << trace.raft_start << "\n";

    os << "\n[committees]\n";
    for (std::size_t c = 0; c < trace.assignment.committees.size(); ++c) {
        os << "chain " << c << ":";
        auto members = trace.assignment.committees[c];
        std::sort(members.begin(), members.end());
        for (auto n : members) os << ' ' << n;
        const auto& m = trace.chains[c];
        os << " (crashes " << m.crashes << ", leaders elected " << m.leaders.size() << ")";
        if (m.expected_stall) os << " expected-stall: crashes leave no quorum, liveness checks waived";
        os << "\n";
    }

    os << "\n[throughput]\n";
    std::uint64_t committed = 0;
    for (const auto& m : trace.chains) committed += m.committed_txs;
    os << "transactions submitted: " << trace.txs_submitted << "\n";
    os << "transactions committed by run end: " << committed << "\n";
    os << "transactions lost to leader crashes: " << trace.txs_lost << "\n";
    os << "committed tx per tick: " << format_double(trace.committed_tx_per_time()) << "\n";
    os << "confirmed tx per tick: " << format_double(trace.confirmed_tx_per_time()) << "\n";

    os << "\n[latency]\n";
    const auto lat = latency_stats(trace);
    os << "confirmed transactions: " << lat.count << "\n";
    os << "mean latency: " << format_double(lat.mean, 3) << "\n";
    os << "p95 latency: " << format_double(lat.p95, 3) << "\n";
    os << "sealed payloads verified: " << trace.sealed_verified << "\n";
    if (!trace.confirm_bar.empty()) os << "final ConfirmBar: " << trace.confirm_bar.back().bar << "\n";

    os << "\n[messages]\n";
    for (const auto& [name, count] : trace.message_counts) os << name << ": " << count << "\n";

    os << "\n[safety]\n";
    os << "blocks checked: " << trace.blocks_checked << "\n";
    os << "order checks: " << trace.order_checks << "\n";
    os << "log matching checks: " << trace.log_matching_checks << "\n";
    os << "safety flags: " << trace.violations.size() << "\n";
    if (trace.any_expected_stall()) os << "note: expected-stall run\n";
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << contents;
    if (!out) throw Error("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_run_outputs(const SimTrace& trace, const std::filesystem::path& out_dir,
                       const std::vector<std::string>& defaulted) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "views");
    write_text_file(out_dir / "throughput.csv", throughput_csv(trace));
    write_text_file(out_dir / "latency.csv", latency_csv(trace));
    write_text_file(out_dir / "confirmbar.csv", confirmbar_csv(trace));
    write_text_file(out_dir / "beacon.csv", beacon_csv(trace.beacon_epochs));
    write_text_file(out_dir / "safety.csv", safety_csv(trace));
    write_text_file(out_dir / "messages.csv", messages_csv(trace));
    write_text_file(out_dir / "config.txt", render_config(trace.config));
    write_text_file(out_dir / "summary.txt", summary_text(trace, defaulted));

    std::ostringstream manifest;
    manifest << "node,chain,crashed_at,expected_stall,arrivals\n";
    for (std::size_t id = 0; id < trace.view_log.size(); ++id) {
        const auto chain = trace.assignment.chain_of.at(id);
        manifest << id << ',' << chain << ','
                 << (trace.crashed_at[id] ? std::to_string(*trace.crashed_at[id]) : std::string()) << ','
                 << (trace.chains[chain].expected_stall ? 1 : 0) << ',' << trace.view_log[id].size() << '\n';
        std::ostringstream node;
        node << "arrival_time,chain_id,height,parent_hash,rank,next_rank,tx_root,proposer_term,block_hash,tx_count\n";
        for (const auto& a : trace.view_log[id]) {
            const auto& h = a.block->header;
            node << a.time << ',' << h.chain_id << ',' << h.height << ',' << to_hex(h.parent_hash) << ',' << h.rank
                 << ',' << h.next_rank << ',' << to_hex(h.tx_root) << ',' << h.proposer_term << ','
                 << to_hex(hash_header(h)) << ',' << a.block->transactions.size() << '\n';
        }
        write_text_file(out_dir / "views" / ("node_" + std::to_string(id) + ".csv"), node.str());
    }
    write_text_file(out_dir / "views" / "manifest.csv", manifest.str());

    if (trace.config.trace) {
        std::string log = "sim_time,src,dst,variant,term,detail\n";
        for (const auto& line : trace.trace_log) log += line + "\n";
        write_text_file(out_dir / "trace.csv", log);
    }
}

}  // namespace rvchain::sim
