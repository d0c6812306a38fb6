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

// Free energy-based reinforcement learning: Q(s, a) ~ -F(s, a) of a clamped
// (quantum) Boltzmann machine, trained with TD(0).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "ferl/free_energy.hpp"
#include "ferl/gridworld.hpp"
#include "ferl/ising.hpp"
#include "ferl/random.hpp"
#include "ferl/samplers.hpp"
#include "ferl/topology.hpp"

namespace ferl {

/// How F(s, a) and the hidden statistics are obtained.
///   rbm                closed form, coupling-free models only
///   sa                 simulated annealing on the binary GBM energy
///   sqa                simulated quantum annealing on the Trotter model
///   external_stacked   annealer reads -> replica stacking -> effective F
///   external_classical annealer reads taken as classical GBM samples
enum class Backend : std::uint8_t { rbm, sa, sqa, external_stacked, external_classical };

std::string_view to_string(Backend b);

enum class NextActionRule : std::uint8_t { greedy, on_policy };

struct SaSettings {
    std::size_t sweeps = 1000;
    std::size_t reads = 100;
    double beta_initial = 0.1;  // linear ramp up to the virtual beta
};

struct SqaSettings {
    std::size_t sweeps = 1000;
    std::size_t reads = 100;
    double gamma_initial = 8.0;  // linear ramp down to the virtual gamma
};

enum class AnnealerKind : std::uint8_t { sqa, sa };

/// Software stand-in for a hardware annealer: produces single-configuration
/// reads. For `sqa` each read is one replica slice of an SQA lattice run at
/// the given physical beta/gamma; for `sa` it is one SA chain.
struct AnnealerSettings {
    AnnealerKind kind = AnnealerKind::sqa;
    double beta = 2.0;
    double gamma = 0.5;
    std::size_t replicas = 8;
    std::size_t sweeps = 100;
    double schedule_start = 8.0;  // initial gamma (sqa) or initial beta (sa)
    std::size_t reads = 3750;
    SpinConvention convention = SpinConvention::spin;  // sa only
};

/// Produces a pool of single-configuration +-1 reads for a clamped model.
using ReadSource = std::function<SamplePool(const ClampedModel&, Rng&)>;

ReadSource make_emulated_annealer(const AnnealerSettings& settings);

struct ExternalSettings {
    AnnealerSettings annealer;
    std::size_t stacked_count = 150;
    ReadSource source;  // overrides `annealer` when set
};

struct AgentConfig {
    double learning_rate = 0.01;
    double discount = 0.8;
    std::size_t training_samples = 500;
    Backend backend = Backend::rbm;
    TfimParameters virtual_params{0.5, 2.0, 25};
    double explore = 0.3;  // epsilon of epsilon-greedy; 0 = purely greedy
    NextActionRule next_action = NextActionRule::greedy;
    SaSettings sa;
    SqaSettings sqa;
    ExternalSettings external;

    void validate() const;
};

/// Free energy of one clamped model plus the statistics its TD update needs.
/// `quantum` evaluations carry <s^z> / <s^z s^z>; classical ones carry the
/// binary <h> / <h h'>. `pairs` follows ClampedModel::couplings().
struct FreeEnergyEvaluation {
    double free_energy = 0.0;
    std::vector<double> hidden;
    std::vector<double> pairs;
    bool quantum = false;
};

/// Dispatches on config.backend. external_stacked with gamma = 0 takes the
/// classical route (reads scored as GBM samples, no stacking).
FreeEnergyEvaluation evaluate_free_energy(const ClampedModel& model, const AgentConfig& config, Rng& rng);

double q_value(const NetworkTopology& topology, std::size_t state, std::size_t action, const AgentConfig& config,
               Rng& rng);

struct Transition {
    std::size_t state = 0;
    std::size_t action = 0;
    double reward = 0.0;
    std::size_t next_state = 0;
    std::size_t next_action = 0;
};

/// Dense deltas: visible_hidden is visible_count x hidden_count row-major,
/// hidden_hidden follows NetworkTopology::hidden_edges().
struct WeightDelta {
    std::vector<double> visible_hidden;
    std::vector<double> hidden_hidden;
};

/// dw_vh = lr (r - discount F(s',a') + F(s,a)) v <s^z_h>,
/// dw_hh' = lr (same) <s^z_h s^z_h'>.
WeightDelta td0_update_quantum(const NetworkTopology& topology, const Transition& t,
                               const ObservableEstimate& observables, double free_energy,
                               double next_free_energy, double learning_rate, double discount);

/// dw_vh = lr (r + discount Q(s',a') - Q(s,a)) v <h>,
/// dw_hh' = lr (same) <h h'>.
WeightDelta td0_update_classical(const NetworkTopology& topology, const Transition& t,
                                 const ClassicalMoments& moments, double q, double next_q, double learning_rate,
                                 double discount);

void apply_delta(NetworkTopology& topology, const WeightDelta& delta);

/// argmax with ties broken uniformly at random.
std::size_t greedy_action(std::span<const double> q, Rng& rng);
/// Epsilon-greedy over precomputed Q-values.
std::size_t select_action(std::span<const double> q, double explore, Rng& rng);
/// Evaluates Q(state, .) with the configured backend, then selects.
std::size_t select_action(const NetworkTopology& topology, std::size_t state, const AgentConfig& config,
                          Rng& rng);

struct FerlRun {
    TrainingHistory history;
    NetworkTopology final_weights;
};

/// Runs config.training_samples independent transitions: uniform state,
/// epsilon-greedy action, environment step, next action by config rule,
/// TD(0) update, then a greedy snapshot of the updated Q. The Q table of the
/// current weights is evaluated once per sample and shared by the snapshot
/// and the next sample's decisions. Deterministic in `seed`.
FerlRun train(const GridWorld& env, const NetworkTopology& topology, const AgentConfig& config,
              std::uint64_t seed);

}  // namespace ferl
