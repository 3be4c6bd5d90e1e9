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

#include "rvchain/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "rvchain/report.hpp"

namespace rvchain::sim {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::uint64_t parse_u64(const std::string& key, std::string_view text) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(key, "expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return value;
}

double parse_double(const std::string& key, std::string_view text) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(key, "expected a number, got '" + std::string(text) + "'");
    }
    return value;
}

bool parse_bool(const std::string& key, std::string_view text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(key, "expected true or false, got '" + std::string(text) + "'");
}

std::vector<CrashSpec> parse_crashes(const std::string& key, std::string_view text) {
    std::vector<CrashSpec> out;
    if (trim(text).empty()) return out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        auto item = trim(text.substr(start, end - start));
        auto colon = item.find(':');
        if (colon == std::string_view::npos) throw ConfigError(key, "entries must look like time:node");
        out.push_back({parse_u64(key, trim(item.substr(0, colon))),
                       static_cast<NodeId>(parse_u64(key, trim(item.substr(colon + 1))))});
        start = end + 1;
    }
    return out;
}

struct Field {
    std::function<void(SimConfig&, const std::string&, std::string_view)> set;
    std::function<std::string(const SimConfig&)> get;
};

template <class T>
Field integer_field(T SimConfig::*member) {
    return {[member](SimConfig& c, const std::string& key, std::string_view v) {
                c.*member = static_cast<T>(parse_u64(key, v));
            },
            [member](const SimConfig& c) { return std::to_string(c.*member); }};
}

Field real_field(double SimConfig::*member) {
    return {[member](SimConfig& c, const std::string& key, std::string_view v) { c.*member = parse_double(key, v); },
            [member](const SimConfig& c) { return format_double(c.*member); }};
}

Field bool_field(bool SimConfig::*member) {
    return {[member](SimConfig& c, const std::string& key, std::string_view v) { c.*member = parse_bool(key, v); },
            [member](const SimConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = {
        {"seed", integer_field(&SimConfig::seed)},
        {"nodes", integer_field(&SimConfig::nodes)},
        {"chains", integer_field(&SimConfig::chains)},
        {"beacon_bits", integer_field(&SimConfig::beacon_bits)},
        {"delta", integer_field(&SimConfig::delta)},
        {"raft_delay_min", integer_field(&SimConfig::raft_delay_min)},
        {"raft_delay_max", integer_field(&SimConfig::raft_delay_max)},
        {"election_timeout", integer_field(&SimConfig::election_timeout)},
        {"heartbeat_interval", integer_field(&SimConfig::heartbeat_interval)},
        {"block_interval", integer_field(&SimConfig::block_interval)},
        {"tx_rate", real_field(&SimConfig::tx_rate)},
        {"sensitive_fraction", real_field(&SimConfig::sensitive_fraction)},
        {"crash_schedule",
         {[](SimConfig& c, const std::string& key, std::string_view v) { c.crash_schedule = parse_crashes(key, v); },
          [](const SimConfig& c) {
              std::string out;
              for (const auto& crash : c.crash_schedule) {
                  if (!out.empty()) out += ",";
                  out += std::to_string(crash.time) + ":" + std::to_string(crash.node);
              }
              return out;
          }}},
        {"run_duration", integer_field(&SimConfig::run_duration)},
        {"drain_duration", integer_field(&SimConfig::drain_duration)},
        {"sample_interval", integer_field(&SimConfig::sample_interval)},
        {"max_block_txs", integer_field(&SimConfig::max_block_txs)},
        {"payload_bytes", integer_field(&SimConfig::payload_bytes)},
        {"empty_blocks", bool_field(&SimConfig::empty_blocks)},
        {"trace", bool_field(&SimConfig::trace)},
    };
    return table;
}

const Field* find_field(std::string_view key) {
    for (const auto& [name, field] : fields()) {
        if (name == key) return &field;
    }
    return nullptr;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& [name, field] : fields()) out.push_back(name);
        return out;
    }();
    return keys;
}

std::vector<std::size_t> parse_chain_list(std::string_view text) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        auto value = parse_u64("chains", trim(text.substr(start, end - start)));
        if (value == 0) throw ConfigError("chains", "chain counts must be positive");
        out.push_back(value);
        start = end + 1;
    }
    return out;
}

ExperimentSpec parse_experiment(std::string_view text) {
    ExperimentSpec spec;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no), "expected key = value");
        }
        std::string key(trim(line.substr(0, eq)));
        auto value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second) throw ConfigError(key, "given more than once");
        if (key == "experiment") {
            if (value != "run" && value != "scale") throw ConfigError(key, "must be run or scale");
            spec.experiment = std::string(value);
        } else if (key == "out_dir") {
            spec.out_dir = std::string(value);
        } else if (key == "chain_counts") {
            try {
                spec.chain_counts = parse_chain_list(value);
            } catch (const ConfigError& e) {
                throw ConfigError(key, e.what());
            }
        } else if (const Field* field = find_field(key)) {
            field->set(spec.config, key, value);
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    for (const auto& key : config_keys()) {
        if (!seen.count(key)) spec.defaulted.push_back(key);
    }
    return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config", "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment(buf.str());
}

std::string render_config(const SimConfig& config) {
    std::string out;
    for (const auto& [name, field] : fields()) out += name + " = " + field.get(config) + "\n";
    return out;
}

}  // namespace rvchain::sim
