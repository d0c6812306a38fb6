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

#include "ferl/agent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ferl/errors.hpp"

namespace ferl {

std::string_view to_string(Backend b) {
    switch (b) {
        case Backend::rbm: return "rbm";
        case Backend::sa: return "sa";
        case Backend::sqa: return "sqa";
        case Backend::external_stacked: return "external-stacked";
        case Backend::external_classical: return "external-classical";
    }
    return "?";
}

void AgentConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ContractError("learning rate must be > 0");
    if (!(discount > 0.0 && discount < 1.0)) throw ContractError("discount must lie in (0, 1)");
    if (training_samples < 1) throw ContractError("training_samples must be >= 1");
    if (!(explore >= 0.0 && explore <= 1.0)) throw ContractError("explore must lie in [0, 1]");
    virtual_params.validate();
    if (backend == Backend::sqa && virtual_params.gamma == 0.0) {
        throw ContractError("sqa backend needs gamma > 0; use the sa backend for gamma = 0");
    }
    if (backend == Backend::sa && sa.reads < 1) throw ContractError("sa reads must be >= 1");
    if (backend == Backend::sqa && sqa.reads < 1) throw ContractError("sqa reads must be >= 1");
    if ((backend == Backend::external_stacked || backend == Backend::external_classical) && !external.source &&
        external.annealer.reads < 1) {
        throw ContractError("annealer reads must be >= 1");
    }
}

ReadSource make_emulated_annealer(const AnnealerSettings& settings) {
    if (settings.kind == AnnealerKind::sqa) {
        const TfimParameters params{settings.gamma, settings.beta, settings.replicas};
        params.validate();
        const AnnealSchedule schedule{settings.sweeps, settings.schedule_start, settings.gamma};
        schedule.validate();
        return [params, schedule, reads = settings.reads](const ClampedModel& model, Rng& rng) {
            return replica_slice(sqa_sample(model, params, schedule, reads, rng), 0);
        };
    }
    const AnnealSchedule schedule{settings.sweeps, settings.schedule_start, settings.beta};
    schedule.validate();
    return [schedule, reads = settings.reads, convention = settings.convention](const ClampedModel& model, Rng& rng) {
        return sa_sample(model, schedule, reads, rng, convention);
    };
}

namespace {

FreeEnergyEvaluation classical_evaluation(const ClampedModel& model, const SamplePool& pool, double beta) {
    auto moments = estimate_classical_moments(pool, model);
    return {estimate_classical_free_energy(model, pool, beta).value, std::move(moments.h), std::move(moments.hh),
            false};
}

FreeEnergyEvaluation quantum_evaluation(const ClampedModel& model, const SamplePool& pool,
                                        const TfimParameters& params) {
    auto obs = estimate_observables(pool, model);
    return {estimate_effective_free_energy(model, pool, params).value, std::move(obs.sigma_z),
            std::move(obs.sigma_zz), true};
}

}  // namespace

FreeEnergyEvaluation evaluate_free_energy(const ClampedModel& model, const AgentConfig& config, Rng& rng) {
    const auto& params = config.virtual_params;
    switch (config.backend) {
        case Backend::rbm: {
            FreeEnergyEvaluation out;
            out.free_energy = rbm_free_energy(model, params.beta);
            out.hidden = rbm_hidden_expectations(model, params.beta);
            for (const auto& c : model.couplings()) out.pairs.push_back(out.hidden[c.first] * out.hidden[c.second]);
            return out;
        }
        case Backend::sa: {
            const AnnealSchedule schedule{config.sa.sweeps, config.sa.beta_initial, params.beta};
            return classical_evaluation(model, sa_sample(model, schedule, config.sa.reads, rng, SpinConvention::binary),
                                        params.beta);
        }
        case Backend::sqa: {
            const AnnealSchedule schedule{config.sqa.sweeps, config.sqa.gamma_initial, params.gamma};
            return quantum_evaluation(model, sqa_sample(model, params, schedule, config.sqa.reads, rng), params);
        }
        case Backend::external_stacked:
        case Backend::external_classical: {
            const ReadSource source =
                config.external.source ? config.external.source : make_emulated_annealer(config.external.annealer);
            const SamplePool reads = source(model, rng);
            if (config.backend == Backend::external_classical || params.gamma == 0.0) {
                return classical_evaluation(model, reads, params.beta);
            }
            return quantum_evaluation(model, stack_replicas(reads, params, config.external.stacked_count, rng),
                                      params);
        }
    }
    throw ContractError("unknown backend");
}

double q_value(const NetworkTopology& topology, std::size_t state, std::size_t action, const AgentConfig& config,
               Rng& rng) {
    return -evaluate_free_energy(clamp(topology, state, action), config, rng).free_energy;
}

namespace {

WeightDelta td0_delta(const NetworkTopology& topology, const Transition& t, std::span<const double> hidden,
                      std::span<const double> pairs, double td_error, double learning_rate) {
    if (hidden.size() != topology.hidden_count() || pairs.size() != topology.hidden_hidden_edge_count()) {
        throw ContractError("td0 update: statistics do not match the topology");
    }
    WeightDelta delta;
    delta.visible_hidden.assign(topology.visible_count() * topology.hidden_count(), 0.0);
    delta.hidden_hidden.assign(pairs.size(), 0.0);
    const double step = learning_rate * td_error;
    if (step == 0.0) return delta;
    // Only the two active (one-hot) visible nodes have v = 1.
    for (std::size_t v : {t.state, topology.state_count() + t.action}) {
        for (std::size_t h = 0; h < topology.hidden_count(); ++h) {
            if (topology.connected(v, h)) delta.visible_hidden[v * topology.hidden_count() + h] = step * hidden[h];
        }
    }
    for (std::size_t e = 0; e < pairs.size(); ++e) delta.hidden_hidden[e] = step * pairs[e];
    return delta;
}

}  // namespace

WeightDelta td0_update_quantum(const NetworkTopology& topology, const Transition& t,
                               const ObservableEstimate& observables, double free_energy,
                               double next_free_energy, double learning_rate, double discount) {
    const double td_error = t.reward - discount * next_free_energy + free_energy;
    return td0_delta(topology, t, observables.sigma_z, observables.sigma_zz, td_error, learning_rate);
}

WeightDelta td0_update_classical(const NetworkTopology& topology, const Transition& t,
                                 const ClassicalMoments& moments, double q, double next_q, double learning_rate,
                                 double discount) {
    const double td_error = t.reward + discount * next_q - q;
    return td0_delta(topology, t, moments.h, moments.hh, td_error, learning_rate);
}

void apply_delta(NetworkTopology& topology, const WeightDelta& delta) {
    const std::size_t hidden = topology.hidden_count();
    if (delta.visible_hidden.size() != topology.visible_count() * hidden ||
        delta.hidden_hidden.size() != topology.hidden_hidden_edge_count()) {
        throw ContractError("apply_delta: shape mismatch");
    }
    for (std::size_t v = 0; v < topology.visible_count(); ++v) {
        for (std::size_t h = 0; h < hidden; ++h) {
            const double d = delta.visible_hidden[v * hidden + h];
            if (d != 0.0) topology.set_visible_hidden(v, h, topology.visible_hidden(v, h) + d);
        }
    }
    for (std::size_t e = 0; e < delta.hidden_hidden.size(); ++e) {
        if (delta.hidden_hidden[e] != 0.0) {
            topology.set_hidden_weight(e, topology.hidden_edges()[e].weight + delta.hidden_hidden[e]);
        }
    }
}

std::size_t greedy_action(std::span<const double> q, Rng& rng) {
    if (q.empty()) throw ContractError("greedy_action: no actions");
    const double best = *std::max_element(q.begin(), q.end());
    std::size_t ties = 0;
    for (double v : q) ties += v == best;
    std::size_t pick = ties == 1 ? 0 : uniform_index(rng, ties);
    for (std::size_t a = 0; a < q.size(); ++a) {
        if (q[a] == best && pick-- == 0) return a;
    }
    return 0;
}

std::size_t select_action(std::span<const double> q, double explore, Rng& rng) {
    if (explore > 0.0 && uniform01(rng) < explore) return uniform_index(rng, q.size());
    return greedy_action(q, rng);
}

std::size_t select_action(const NetworkTopology& topology, std::size_t state, const AgentConfig& config,
                          Rng& rng) {
    std::vector<double> q(topology.action_count());
    for (std::size_t a = 0; a < q.size(); ++a) q[a] = q_value(topology, state, a, config, rng);
    return select_action(q, config.explore, rng);
}

namespace {

struct QTable {
    std::size_t actions = 0;
    std::vector<FreeEnergyEvaluation> evals;
    std::vector<double> q;

    std::span<const double> row(std::size_t s) const { return {q.data() + s * actions, actions}; }
    const FreeEnergyEvaluation& at(std::size_t s, std::size_t a) const { return evals[s * actions + a]; }
};

QTable evaluate_table(const NetworkTopology& topology, const AgentConfig& config, Rng& rng) {
    QTable table;
    table.actions = topology.action_count();
    table.evals.reserve(topology.state_count() * table.actions);
    table.q.reserve(topology.state_count() * table.actions);
    for (std::size_t s = 0; s < topology.state_count(); ++s) {
        for (std::size_t a = 0; a < table.actions; ++a) {
            table.evals.push_back(evaluate_free_energy(clamp(topology, s, a), config, rng));
            table.q.push_back(-table.evals.back().free_energy);
        }
    }
    return table;
}

}  // namespace

FerlRun train(const GridWorld& env, const NetworkTopology& topology, const AgentConfig& config,
              std::uint64_t seed) {
    config.validate();
    if (topology.state_count() != env.state_count() || topology.action_count() != kActionCount) {
        throw ContractError("train: topology visible layer does not match the environment");
    }
    Rng rng(seed);
    FerlRun run{{}, topology};
    auto& weights = run.final_weights;
    run.history.snapshots.reserve(config.training_samples);
    run.history.td_errors.reserve(config.training_samples);

    QTable table = evaluate_table(weights, config, rng);
    for (std::size_t i = 0; i < config.training_samples; ++i) {
        Transition t;
        t.state = uniform_index(rng, env.state_count());
        t.action = select_action(table.row(t.state), config.explore, rng);
        const auto step = env.step(t.state, kActions[t.action]);
        t.reward = step.reward;
        t.next_state = step.next_state;
        t.next_action = config.next_action == NextActionRule::greedy
                            ? greedy_action(table.row(t.next_state), rng)
                            : select_action(table.row(t.next_state), config.explore, rng);

        const auto& current = table.at(t.state, t.action);
        const auto& next = table.at(t.next_state, t.next_action);
        WeightDelta delta;
        if (current.quantum) {
            const ObservableEstimate obs{current.hidden, current.pairs};
            delta = td0_update_quantum(weights, t, obs, current.free_energy, next.free_energy, config.learning_rate,
                                       config.discount);
        } else {
            const ClassicalMoments moments{current.hidden, current.pairs};
            delta = td0_update_classical(weights, t, moments, -current.free_energy, -next.free_energy,
                                         config.learning_rate, config.discount);
        }
        run.history.td_errors.push_back(t.reward - config.discount * next.free_energy + current.free_energy);
        apply_delta(weights, delta);

        table = evaluate_table(weights, config, rng);
        PolicyTable snapshot(env.state_count());
        for (std::size_t s = 0; s < env.state_count(); ++s) {
            snapshot[s] = static_cast<std::uint8_t>(greedy_action(table.row(s), rng));
        }
        run.history.snapshots.push_back(std::move(snapshot));
    }
    return run;
}

}  // namespace ferl
