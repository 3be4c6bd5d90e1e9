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

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace rvchain::cli;
    CLI::App app{"rvchain: sharded-consensus simulator and experiment runner"};
    app.require_subcommand(1);

    RunOptions run;
    std::uint64_t run_seed = 0;
    auto* run_cmd = app.add_subcommand("run", "run one simulation and write CSV outputs");
    run_cmd->add_option("--config", run.config_path, "experiment file")->required();
    run_cmd->add_option("--out", run.out_dir, "output directory (overrides out_dir in the file)");
    auto* run_seed_opt = run_cmd->add_option("--seed", run_seed, "master seed (overrides the file)");
    run_cmd->add_flag("--trace", run.trace, "write trace.csv with one record per delivery");

    BeaconStatsOptions beacon;
    auto* beacon_cmd = app.add_subcommand("beacon-stats", "Monte Carlo of the randomness beacon");
    beacon_cmd->add_option("--nodes", beacon.nodes, "participants N")->capture_default_str();
    beacon_cmd->add_option("--bits", beacon.bits, "beacon bit length l")->capture_default_str();
    beacon_cmd->add_option("--epochs", beacon.epochs, "epochs to simulate")->capture_default_str();
    beacon_cmd->add_option("--seed", beacon.seed, "master seed")->capture_default_str();
    beacon_cmd->add_option("--delta", beacon.delta, "synchrony bound")->capture_default_str();
    beacon_cmd->add_option("--out", beacon.out_dir, "output directory")->required();

    ScaleOptions scale;
    std::uint64_t scale_seed = 0;
    auto* scale_cmd = app.add_subcommand("scale", "throughput as the chain count grows");
    scale_cmd->add_option("--config", scale.config_path, "base experiment file")->required();
    scale_cmd->add_option("--out", scale.out_dir, "output directory (overrides out_dir in the file)");
    scale_cmd->add_option("--chains", scale.chains, "comma-separated chain counts, e.g. 1,2,4,8");
    auto* scale_seed_opt = scale_cmd->add_option("--seed", scale_seed, "master seed (overrides the file)");

    std::string trace_dir;
    std::string order_out;
    auto* verify_cmd = app.add_subcommand("verify-order", "replay recorded views and check the total order");
    verify_cmd->add_option("trace_dir", trace_dir, "output directory of a previous run")->required();
    verify_cmd->add_option("--out", order_out, "write each node's final order here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*run_cmd) {
            if (*run_seed_opt) run.seed = run_seed;
            return cmd_run(run, std::cout, std::cerr);
        }
        if (*beacon_cmd) return cmd_beacon_stats(beacon, std::cout, std::cerr);
        if (*scale_cmd) {
            if (*scale_seed_opt) scale.seed = scale_seed;
            return cmd_scale(scale, std::cout, std::cerr);
        }
        return cmd_verify_order(trace_dir, order_out, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
