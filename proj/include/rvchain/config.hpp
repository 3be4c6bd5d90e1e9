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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rvchain/simnet.hpp"

namespace rvchain::sim {

/// A parsed experiment file: simulator settings plus experiment plumbing.
///
/// The file format is one `key = value` per line. `#` starts a comment.
/// Unknown and repeated keys are rejected; absent keys keep their defaults
/// and are listed in `defaulted` so reports can echo them.
struct ExperimentSpec {
    SimConfig config;
    std::string experiment = "run";  // run | scale
    std::string out_dir;
    std::vector<std::size_t> chain_counts{1, 2, 4, 8};
    std::vector<std::string> defaulted;
};

ExperimentSpec parse_experiment(std::string_view text);
ExperimentSpec load_experiment(const std::filesystem::path& path);

// Comma-separated positive integers, e.g. "1,2,4". Throws ConfigError("chains").
std::vector<std::size_t> parse_chain_list(std::string_view text);

// Every SimConfig key with its effective value, in the order of config_keys().
std::string render_config(const SimConfig& config);
const std::vector<std::string>& config_keys();

}  // namespace rvchain::sim
