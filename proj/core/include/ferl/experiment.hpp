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

#pragma once

// Learning-curve and virtual-parameter experiments over many seeded runs.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ferl/agent.hpp"
#include "ferl/dqn.hpp"
#include "ferl/gridworld.hpp"
#include "ferl/topology.hpp"

namespace ferl {

enum class Method : std::uint8_t {
    rbm,
    sa_bipartite,
    sa_chimera,
    sqa_bipartite,
    sqa_chimera,
    external_stacked,
    external_classical,
    dqn,
};

inline constexpr std::array<Method, 8> kMethods{Method::rbm,           Method::sa_bipartite,
                                                Method::sa_chimera,    Method::sqa_bipartite,
                                                Method::sqa_chimera,   Method::external_stacked,
                                                Method::external_classical, Method::dqn};

/// Names as used on the command line and in CSV output, e.g. "sqa-chimera".
std::string_view to_string(Method m);
/// Throws ConfigError for unknown names.
Method parse_method(std::string_view name);

/// Everything one run of a method needs besides the environment and seed.
struct MethodSettings {
    AgentConfig agent;
    std::size_t hidden_count = 16;   // rbm only
    double init_scale = 25.0;        // visible-hidden weights ~ U[-s, s]
    double hidden_init_scale = 0.1;  // hidden-hidden weights ~ U[-s, s]
    DqnConfig dqn;                   // dqn only; input width follows the environment
};

/// Calibrated defaults. All FERL methods share beta = 2 and gamma = 0.5.
MethodSettings default_settings(Method m);

/// Untrained graph for `m` (Chimera two-cell, bipartite DBM or RBM).
/// Throws ContractError for dqn, which has no Boltzmann machine.
NetworkTopology build_network(Method m, const MethodSettings& settings, std::size_t state_count = 14);

struct MethodSpec {
    Method method = Method::rbm;
    MethodSettings settings = default_settings(Method::rbm);
};

/// Seed of run `run` of `method`: mix_seed(mix_seed(master, id), run), where
/// id is the method's fixed index in kMethods. Adding runs or methods never
/// changes the seeds of existing ones.
std::uint64_t run_seed(std::uint64_t master, Method method, std::size_t run);

/// One training run: weights are initialised from `seed`, then trained.
/// When `final_weights` is non-null it receives the trained network.
TrainingHistory run_once(const GridWorld& env, const MethodSpec& spec, std::uint64_t seed,
                         NetworkTopology* final_weights = nullptr);

struct CurvesSpec {
    std::vector<MethodSpec> methods;
    std::size_t runs = 20;
    std::size_t samples = 500;
    std::uint64_t seed = 20170101;
    GridWorld env = GridWorld::canonical();

    void validate() const;  // ConfigError
};

struct RunOptions {
    std::size_t jobs = 1;
    /// When set, final weights of FERL runs are written here as
    /// <method>-<run>.topology.
    std::optional<std::filesystem::path> checkpoint_dir;
};

struct CurveResult {
    Method method = Method::rbm;
    FidelityCurve curve;
};

/// Runs every (method, run) pair on up to options.jobs threads. Results are
/// ordered by method and do not depend on the thread count.
std::vector<CurveResult> run_learning_curves(const CurvesSpec& spec, const RunOptions& options = {});

/// Header `method,sample,mean_fidelity,stderr`; sample is 1-based.
void write_curves_csv(std::ostream& out, std::span<const CurveResult> results);

struct HeatmapSpec {
    std::vector<double> betas{0.5, 1.0, 2.0, 4.0};
    std::vector<double> gammas{0.0, 0.1, 0.25, 0.5, 1.0, 2.0};
    std::size_t runs = 10;
    std::size_t samples = 300;
    std::uint64_t seed = 20170101;
    /// The cell's beta and gamma overwrite agent.virtual_params; gamma = 0
    /// cells score the reads as classical GBM samples.
    MethodSettings settings = default_settings(Method::external_stacked);
    GridWorld env = GridWorld::canonical();

    void validate() const;  // ConfigError
};

struct HeatmapCell {
    double beta = 0.0;
    double gamma = 0.0;
    double avg_fidelity = 0.0;  // over runs and training samples
};

/// Seed of run `run` in cell (beta, gamma); derived from the bit patterns of
/// beta and gamma so that editing the grid leaves other cells unchanged.
std::uint64_t cell_seed(std::uint64_t master, double beta, double gamma, std::size_t run);

/// Cells are ordered beta-major, matching the grid order in `spec`.
std::vector<HeatmapCell> run_heatmap(const HeatmapSpec& spec, const RunOptions& options = {});

/// Header `beta,gamma,avg_fidelity`.
void write_heatmap_csv(std::ostream& out, std::span<const HeatmapCell> cells);

struct ExperimentConfig {
    CurvesSpec curves;
    HeatmapSpec heatmap;
};

/// Defaults: all FERL methods plus dqn except the external ones for curves,
/// and the default grid for the heatmap.
ExperimentConfig default_config();

/// JSON config. Unknown keys and ill-typed values throw ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
/// Throws ConfigError naming `path` when it cannot be read or parsed.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace ferl
