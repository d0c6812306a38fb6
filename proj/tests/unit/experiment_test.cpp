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

#include "ferl/experiment.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ferl/errors.hpp"

namespace ferl {
namespace {

CurvesSpec small_curves() {
    CurvesSpec spec;
    spec.methods = {{Method::rbm, default_settings(Method::rbm)}, {Method::dqn, default_settings(Method::dqn)}};
    spec.runs = 3;
    spec.samples = 5;
    spec.seed = 99;
    return spec;
}

std::string curves_csv(const CurvesSpec& spec, std::size_t jobs) {
    std::ostringstream out;
    write_curves_csv(out, run_learning_curves(spec, {jobs, std::nullopt}));
    return out.str();
}

std::string config_error(std::string_view json) {
    try {
        parse_config(json);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(experiment, method_names_round_trip) {
    for (Method m : kMethods) EXPECT_EQ(parse_method(to_string(m)), m);
    EXPECT_EQ(to_string(Method::sqa_chimera), "sqa-chimera");
    EXPECT_THROW(parse_method("sqa_chimera"), ConfigError);
}

TEST(experiment, defaults_share_virtual_parameters) {
    for (Method m : kMethods) {
        if (m == Method::dqn) continue;
        const auto s = default_settings(m);
        EXPECT_DOUBLE_EQ(s.agent.virtual_params.beta, 2.0) << to_string(m);
        EXPECT_DOUBLE_EQ(s.agent.virtual_params.gamma, 0.5) << to_string(m);
    }
    EXPECT_THROW(build_network(Method::dqn, default_settings(Method::dqn)), ContractError);
    EXPECT_EQ(build_network(Method::sa_chimera, default_settings(Method::sa_chimera)).kind(), TopologyKind::chimera);
    EXPECT_EQ(build_network(Method::sqa_bipartite, default_settings(Method::sqa_bipartite)).kind(), TopologyKind::dbm);
}

TEST(experiment, run_seeds_are_stable_and_distinct) {
    EXPECT_EQ(run_seed(1, Method::rbm, 0), mix_seed(mix_seed(1, 0), 0));
    EXPECT_EQ(run_seed(1, Method::dqn, 3), mix_seed(mix_seed(1, 7), 3));
    EXPECT_NE(run_seed(1, Method::rbm, 0), run_seed(1, Method::rbm, 1));
    EXPECT_NE(run_seed(1, Method::rbm, 0), run_seed(1, Method::sa_chimera, 0));
    EXPECT_NE(cell_seed(1, 2.0, 0.5, 0), cell_seed(1, 0.5, 2.0, 0));
}

TEST(experiment, curves_csv_format) {
    const auto csv = curves_csv(small_curves(), 1);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "method,sample,mean_fidelity,stderr");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 2U * 5U);
    EXPECT_NE(csv.find("\nrbm,1,"), std::string::npos);
    EXPECT_NE(csv.find("\ndqn,5,"), std::string::npos);
}

TEST(experiment, results_do_not_depend_on_thread_count) {
    const auto spec = small_curves();
    EXPECT_EQ(curves_csv(spec, 1), curves_csv(spec, 4));
    EXPECT_EQ(curves_csv(spec, 1), curves_csv(spec, 1));
}

TEST(experiment, adding_runs_keeps_existing_runs) {
    const auto env = GridWorld::canonical();
    MethodSpec m{Method::rbm, default_settings(Method::rbm)};
    m.settings.agent.training_samples = 5;
    const auto a = run_once(env, m, run_seed(99, Method::rbm, 1));
    const auto b = run_once(env, m, run_seed(99, Method::rbm, 1));
    EXPECT_EQ(a.snapshots, b.snapshots);
}

TEST(experiment, checkpoints_are_written) {
    const auto dir = std::filesystem::temp_directory_path() / "ferl_checkpoint_test";
    std::filesystem::remove_all(dir);
    auto spec = small_curves();
    spec.runs = 2;
    run_learning_curves(spec, {1, dir});
    EXPECT_TRUE(std::filesystem::exists(dir / "rbm-0.topology"));
    EXPECT_TRUE(std::filesystem::exists(dir / "rbm-1.topology"));
    EXPECT_FALSE(std::filesystem::exists(dir / "dqn-0.topology"));
    std::ifstream in(dir / "rbm-1.topology");
    EXPECT_EQ(load_topology(in).kind(), TopologyKind::rbm);
    std::filesystem::remove_all(dir);
}

TEST(experiment, default_heatmap_grid_contains_reference_point) {
    const HeatmapSpec spec;
    EXPECT_NE(std::find(spec.betas.begin(), spec.betas.end(), 2.0), spec.betas.end());
    EXPECT_NE(std::find(spec.gammas.begin(), spec.gammas.end(), 0.5), spec.gammas.end());
    EXPECT_NE(std::find(spec.gammas.begin(), spec.gammas.end(), 0.0), spec.gammas.end());
}

TEST(experiment, heatmap_cells_are_beta_major) {
    HeatmapSpec spec;
    spec.betas = {1.0, 2.0};
    spec.gammas = {0.0, 0.5, 1.0};
    spec.runs = 1;
    spec.samples = 2;
    const auto cells = run_heatmap(spec, {2, std::nullopt});
    ASSERT_EQ(cells.size(), 6U);
    EXPECT_DOUBLE_EQ(cells[1].beta, 1.0);
    EXPECT_DOUBLE_EQ(cells[1].gamma, 0.5);
    EXPECT_DOUBLE_EQ(cells[3].beta, 2.0);
    for (const auto& c : cells) {
        EXPECT_GE(c.avg_fidelity, 0.0);
        EXPECT_LE(c.avg_fidelity, 1.0);
    }
    std::ostringstream out;
    write_heatmap_csv(out, cells);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "beta,gamma,avg_fidelity");
    EXPECT_NE(out.str().find("\n2,0.5,"), std::string::npos);
}

TEST(experiment, parse_config_overrides) {
    const auto cfg = parse_config(R"({
        "seed": 5,
        "environment": {"map": ["R..", ".W.", "..P"], "discount": 0.9},
        "curves": {"runs": 2, "samples": 7,
                   "methods": ["rbm", {"method": "sa-chimera", "learning_rate": 0.02, "sweeps": 30}]},
        "heatmap": {"betas": [1], "gammas": [0, 1], "settings": {"annealer": {"reads": 20}}}
    })");
    EXPECT_EQ(cfg.curves.seed, 5U);
    EXPECT_EQ(cfg.heatmap.seed, 5U);
    EXPECT_EQ(cfg.curves.env.state_count(), 8U);
    EXPECT_DOUBLE_EQ(cfg.curves.env.discount(), 0.9);
    EXPECT_EQ(cfg.curves.runs, 2U);
    ASSERT_EQ(cfg.curves.methods.size(), 2U);
    EXPECT_EQ(cfg.curves.methods[1].method, Method::sa_chimera);
    EXPECT_DOUBLE_EQ(cfg.curves.methods[1].settings.agent.learning_rate, 0.02);
    EXPECT_EQ(cfg.curves.methods[1].settings.agent.sa.sweeps, 30U);
    EXPECT_EQ(cfg.heatmap.settings.agent.external.annealer.reads, 20U);
    EXPECT_EQ(cfg.heatmap.gammas.size(), 2U);
}

TEST(experiment, parse_config_errors) {
    EXPECT_NE(config_error("{").find("invalid JSON"), std::string::npos);
    EXPECT_NE(config_error(R"({"bogus": 1})").find("unknown key 'bogus'"), std::string::npos);
    EXPECT_NE(config_error(R"({"curves": {"runs": "many"}})").find("curves.runs"), std::string::npos);
    EXPECT_NE(config_error(R"({"curves": {"methods": ["nope"]}})").find("unknown method"), std::string::npos);
    EXPECT_NE(config_error(R"({"curves": {"methods": [{"method": "rbm", "sweeps": 3}]}})").find("sweeps"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"curves": {"runs": 0}})").find("runs"), std::string::npos);
    EXPECT_NE(config_error(R"({"heatmap": {"gammas": [-1]}})").find("gamma"), std::string::npos);
    EXPECT_NE(config_error(R"({"environment": {"map": ["R.", "."]}})").find("environment"), std::string::npos);
    EXPECT_NE(config_error(R"({"curves": {"methods": [{"method": "sqa-chimera", "learning_rate": -1}]}})")
                  .find("sqa-chimera"),
              std::string::npos);
}

TEST(experiment, load_config_names_the_file) {
    try {
        load_config("/nonexistent/ferl.json");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/ferl.json"), std::string::npos);
    }
}

}  // namespace ferl
