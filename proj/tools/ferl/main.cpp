// Copyright 2026 The FERL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// ferl: learning curves, virtual-parameter heatmaps, oracle self-checks and
// pool dumps.
//
// Exit codes: 0 success, 1 usage or config error, 2 runtime failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ferl/errors.hpp"
#include "ferl/experiment.hpp"
#include "ferl/samplers.hpp"
#include "oracle_check.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::size_t jobs = 1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config, "JSON experiment config (defaults are used when omitted)");
    cmd->add_option("--seed", flags.seed, "Master seed (overrides the config)");
    cmd->add_option("--out", flags.out, "Output CSV path (stdout when omitted)");
    cmd->add_option("--jobs", flags.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

ferl::ExperimentConfig load(const CommonFlags& flags) {
    return flags.config.empty() ? ferl::default_config() : ferl::load_config(flags.config);
}

template <typename Write>
void emit(const std::string& path, Write write) {
    if (path.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    write(out);
    if (!out) throw std::runtime_error("failed writing " + path);
}

struct SampleFlags {
    std::string topology;
    std::size_t state = 0;
    std::size_t action = 0;
    std::string sampler = "sa";
    std::size_t reads = 100;
    std::size_t sweeps = 1000;
    double beta = 2.0;
    double gamma = 0.5;
    std::size_t replicas = 25;
    double schedule_start = -1.0;
    std::uint64_t seed = 1;
    std::string out;
};

void run_sample(const SampleFlags& f) {
    std::ifstream in(f.topology);
    if (!in) throw ferl::ConfigError("cannot open topology file " + f.topology);
    ferl::NetworkTopology topology;
    try {
        topology = ferl::load_topology(in);
    } catch (const ferl::ParseError& e) {
        throw ferl::ConfigError(f.topology + ":" + std::to_string(e.line()) + ": " + e.what());
    }
    if (f.state >= topology.state_count() || f.action >= topology.action_count()) {
        throw ferl::ConfigError("state or action index out of range for " + f.topology);
    }
    const auto model = ferl::clamp(topology, f.state, f.action);
    ferl::Rng rng(f.seed);
    ferl::SamplePool pool;
    if (f.sampler == "sa") {
        const double start = f.schedule_start < 0.0 ? 0.1 : f.schedule_start;
        pool = ferl::sa_sample(model, {f.sweeps, start, f.beta}, f.reads, rng);
    } else {
        const double start = f.schedule_start < 0.0 ? 8.0 : f.schedule_start;
        pool = ferl::sqa_sample(model, {f.gamma, f.beta, f.replicas}, {f.sweeps, start, f.gamma}, f.reads, rng);
    }
    emit(f.out, [&](std::ostream& out) { ferl::write_pool(out, pool); });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free energy-based reinforcement learning experiments"};
    app.require_subcommand(1);

    CommonFlags curves_flags;
    std::string checkpoint_dir;
    auto* curves = app.add_subcommand("curves", "Fidelity learning curves, one CSV row per method and sample");
    add_common(curves, curves_flags);
    curves->add_option("--checkpoint-dir", checkpoint_dir, "Write final weights of every run here");

    CommonFlags heatmap_flags;
    auto* heatmap = app.add_subcommand("heatmap", "Average fidelity over a (beta, gamma) grid");
    add_common(heatmap, heatmap_flags);

    auto* oracle = app.add_subcommand("oracle-check", "Cross-check estimators against exact small-instance oracles");
    std::uint64_t oracle_seed = 7;
    oracle->add_option("--seed", oracle_seed, "Seed for the randomized fixtures");

    SampleFlags sample_flags;
    auto* sample = app.add_subcommand("sample", "Dump a sample pool for one clamped model");
    sample->add_option("--topology", sample_flags.topology, "Weights file written by --checkpoint-dir")->required();
    sample->add_option("--state", sample_flags.state, "Clamped state index");
    sample->add_option("--action", sample_flags.action, "Clamped action index");
    sample->add_option("--sampler", sample_flags.sampler, "sa or sqa")->check(CLI::IsMember({"sa", "sqa"}));
    sample->add_option("--reads", sample_flags.reads, "Independent reads")->check(CLI::PositiveNumber);
    sample->add_option("--sweeps", sample_flags.sweeps, "Sweeps per read")->check(CLI::PositiveNumber);
    sample->add_option("--beta", sample_flags.beta, "Final inverse temperature");
    sample->add_option("--gamma", sample_flags.gamma, "Final transverse field (sqa)");
    sample->add_option("--replicas", sample_flags.replicas, "Trotter slices (sqa)")->check(CLI::PositiveNumber);
    sample->add_option("--schedule-start", sample_flags.schedule_start,
                       "Initial beta (sa, default 0.1) or gamma (sqa, default 8)");
    sample->add_option("--seed", sample_flags.seed, "Sampler seed");
    sample->add_option("--out", sample_flags.out, "Output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        if (e.get_exit_code() != 0) std::cerr << app.help();
        return kExitConfig;
    }

    try {
        if (curves->parsed()) {
            auto config = load(curves_flags);
            if (curves_flags.seed) config.curves.seed = *curves_flags.seed;
            ferl::RunOptions options{curves_flags.jobs, std::nullopt};
            if (!checkpoint_dir.empty()) options.checkpoint_dir = checkpoint_dir;
            const auto results = ferl::run_learning_curves(config.curves, options);
            emit(curves_flags.out, [&](std::ostream& out) { ferl::write_curves_csv(out, results); });
        } else if (heatmap->parsed()) {
            auto config = load(heatmap_flags);
            if (heatmap_flags.seed) config.heatmap.seed = *heatmap_flags.seed;
            const auto cells = ferl::run_heatmap(config.heatmap, {heatmap_flags.jobs, std::nullopt});
            emit(heatmap_flags.out, [&](std::ostream& out) { ferl::write_heatmap_csv(out, cells); });
        } else if (oracle->parsed()) {
            return ferl::tools::run_oracle_checks(std::cout, oracle_seed) ? 0 : kExitRuntime;
        } else if (sample->parsed()) {
            run_sample(sample_flags);
        }
    } catch (const ferl::ConfigError& e) {
        std::cerr << "ferl: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "ferl: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
