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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "ferl/errors.hpp"

namespace ferl {
namespace {

// Two states, one action, two hidden units; every visible-hidden pair is an
// edge and the hidden units share one coupling.
NetworkTopology tiny_topology() {
    return NetworkTopology(TopologyKind::custom, 2, 1, 2, std::vector<std::uint8_t>(6, 1), {{0, 1, 0.0}});
}

AgentConfig sa_config() {
    AgentConfig cfg;
    cfg.backend = Backend::sa;
    cfg.virtual_params = {0.5, 2.0, 5};
    cfg.sa = {20, 5, 0.1};
    cfg.training_samples = 20;
    return cfg;
}

AgentConfig emulated_sa_config(Backend backend) {
    AgentConfig cfg = sa_config();
    cfg.backend = backend;
    cfg.external.annealer = {AnnealerKind::sa, cfg.virtual_params.beta, 0.5, 1, cfg.sa.sweeps, cfg.sa.beta_initial,
                             cfg.sa.reads, SpinConvention::binary};
    return cfg;
}

}  // namespace

TEST(agent, zero_weight_rbm_q_value) {
    const auto topo = build_rbm(14, 5, 16);
    AgentConfig cfg;
    Rng rng(1);
    EXPECT_NEAR(q_value(topo, 3, 2, cfg, rng), 16.0 / 2.0 * std::log(2.0), 1e-12);
}

TEST(agent, quantum_update_hand_computed) {
    const auto topo = tiny_topology();
    const Transition t{1, 0, 1.0, 0, 0};
    const ObservableEstimate obs{{0.5, -0.2}, {0.3}};
    // TD error = 1 - 0.5 * (-2) + (-1) = 1.
    const auto d = td0_update_quantum(topo, t, obs, -1.0, -2.0, 0.1, 0.5);
    const std::vector<double> expected_vh{0.0, 0.0, 0.05, -0.02, 0.05, -0.02};
    ASSERT_EQ(d.visible_hidden.size(), 6U);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(d.visible_hidden[i], expected_vh[i], 1e-15);
    EXPECT_NEAR(d.hidden_hidden[0], 0.03, 1e-15);
}

TEST(agent, classical_update_hand_computed) {
    const auto topo = tiny_topology();
    const Transition t{0, 0, 2.0, 1, 0};
    const ClassicalMoments m{{0.25, 1.0}, {0.25}};
    // TD error = 2 + 0.5 * 4 - 3 = 1.
    const auto d = td0_update_classical(topo, t, m, 3.0, 4.0, 0.2, 0.5);
    EXPECT_NEAR(d.visible_hidden[0], 0.05, 1e-15);
    EXPECT_NEAR(d.visible_hidden[1], 0.2, 1e-15);
    EXPECT_EQ(d.visible_hidden[2], 0.0);
    EXPECT_EQ(d.visible_hidden[3], 0.0);
    EXPECT_NEAR(d.visible_hidden[4], 0.05, 1e-15);
    EXPECT_NEAR(d.hidden_hidden[0], 0.05, 1e-15);
}

TEST(agent, zero_td_error_gives_zero_delta) {
    const auto topo = tiny_topology();
    const Transition t{0, 0, 1.0, 1, 0};
    const auto d = td0_update_classical(topo, t, {{0.5, 0.5}, {0.25}}, 1.0, 0.0, 0.1, 0.8);
    for (double v : d.visible_hidden) EXPECT_EQ(v, 0.0);
    for (double v : d.hidden_hidden) EXPECT_EQ(v, 0.0);
}

TEST(agent, update_touches_only_edges) {
    const auto topo = build_chimera_two_cell();
    const Transition t{4, 1, 1.0, 2, 0};
    const std::vector<double> ones(topo.hidden_count(), 1.0);
    const auto d = td0_update_classical(topo, t, {ones, std::vector<double>(topo.hidden_hidden_edge_count(), 1.0)},
                                        0.0, 0.0, 1.0, 0.8);
    for (std::size_t v = 0; v < topo.visible_count(); ++v) {
        for (std::size_t h = 0; h < topo.hidden_count(); ++h) {
            const bool active = v == 4 || v == topo.state_count() + 1;
            EXPECT_EQ(d.visible_hidden[v * topo.hidden_count() + h] != 0.0, active && topo.connected(v, h));
        }
    }
    auto updated = topo;
    apply_delta(updated, d);
    EXPECT_DOUBLE_EQ(updated.hidden_edges()[0].weight, 1.0);
}

TEST(agent, update_rejects_mismatched_statistics) {
    const auto topo = tiny_topology();
    EXPECT_THROW(td0_update_classical(topo, {}, {{0.5}, {}}, 0.0, 0.0, 0.1, 0.8), ContractError);
}

TEST(agent, repeated_updates_with_zero_discount_approach_reward) {
    auto topo = build_rbm(3, 2, 4);
    AgentConfig cfg;
    Rng rng(2);
    topo = init_weights(topo, rng, 0.1);
    const Transition t{1, 0, 5.0, 2, 1};
    for (int i = 0; i < 3000; ++i) {
        const auto eval = evaluate_free_energy(clamp(topo, t.state, t.action), cfg, rng);
        apply_delta(topo, td0_update_classical(topo, t, {eval.hidden, eval.pairs}, -eval.free_energy, 0.0, 0.01, 0.0));
    }
    EXPECT_NEAR(q_value(topo, 1, 0, cfg, rng), 5.0, 1e-3);
}

TEST(agent, full_exploration_is_uniform) {
    Rng rng(3);
    const std::vector<double> q{5.0, 1.0, 0.0, 2.0, 9.0};
    std::vector<int> counts(5, 0);
    const int n = 50000;
    for (int i = 0; i < n; ++i) ++counts[select_action(q, 1.0, rng)];
    // 5 sigma of a binomial(n, 0.2) count.
    for (int c : counts) EXPECT_NEAR(c, n / 5, 5.0 * std::sqrt(n * 0.16));
}

TEST(agent, greedy_ties_break_uniformly) {
    Rng rng(4);
    const std::vector<double> q{1.0, 3.0, 3.0, 0.0, 3.0};
    std::vector<int> counts(5, 0);
    const int n = 30000;
    for (int i = 0; i < n; ++i) ++counts[greedy_action(q, rng)];
    EXPECT_EQ(counts[0] + counts[3], 0);
    for (int a : {1, 2, 4}) EXPECT_NEAR(counts[a], n / 3, 5.0 * std::sqrt(n * 2.0 / 9.0));
    EXPECT_EQ(greedy_action(std::vector<double>{0.0, 2.0}, rng), 1U);
}

TEST(agent, training_is_deterministic) {
    const auto env = GridWorld::canonical();
    Rng rng(5);
    const auto topo = init_weights(build_chimera_two_cell(), rng, 1.0);
    const auto cfg = sa_config();
    const auto a = train(env, topo, cfg, 77);
    const auto b = train(env, topo, cfg, 77);
    EXPECT_EQ(a.history.snapshots, b.history.snapshots);
    EXPECT_EQ(a.history.td_errors, b.history.td_errors);
    EXPECT_EQ(a.final_weights, b.final_weights);
    EXPECT_EQ(a.history.snapshots.size(), 20U);
}

TEST(agent, single_sample_gives_one_snapshot) {
    AgentConfig cfg;
    cfg.training_samples = 1;
    const auto run = train(GridWorld::canonical(), build_rbm(), cfg, 1);
    EXPECT_EQ(run.history.snapshots.size(), 1U);
    EXPECT_EQ(run.history.snapshots[0].size(), 14U);
}

TEST(agent, train_rejects_mismatched_topology) {
    EXPECT_THROW(train(GridWorld::canonical(), build_rbm(10, 5, 4), AgentConfig{}, 1), ContractError);
}

TEST(agent, classical_external_route_equals_sa_backend) {
    const auto env = GridWorld::canonical();
    Rng rng(6);
    const auto topo = init_weights(build_chimera_two_cell(), rng, 1.0);
    const auto direct = train(env, topo, sa_config(), 9);
    const auto routed = train(env, topo, emulated_sa_config(Backend::external_classical), 9);
    EXPECT_EQ(direct.history.snapshots, routed.history.snapshots);
    EXPECT_EQ(direct.history.td_errors, routed.history.td_errors);
}

TEST(agent, stacked_route_at_zero_gamma_is_classical) {
    const auto env = GridWorld::canonical();
    Rng rng(7);
    const auto topo = init_weights(build_chimera_two_cell(), rng, 1.0);
    auto classical = emulated_sa_config(Backend::external_classical);
    auto stacked = emulated_sa_config(Backend::external_stacked);
    classical.virtual_params.gamma = 0.0;
    stacked.virtual_params.gamma = 0.0;
    const auto a = train(env, topo, classical, 10);
    const auto b = train(env, topo, stacked, 10);
    EXPECT_EQ(a.history.snapshots, b.history.snapshots);
    EXPECT_EQ(a.history.td_errors, b.history.td_errors);
}

TEST(agent, external_source_overrides_annealer) {
    AgentConfig cfg = emulated_sa_config(Backend::external_classical);
    int calls = 0;
    cfg.external.source = [&calls](const ClampedModel& model, Rng&) {
        ++calls;
        SamplePool pool(PoolSource::external, model.hidden_count(), 1);
        pool.add(std::vector<std::int8_t>(model.hidden_count(), 1));
        return pool;
    };
    Rng rng(8);
    const auto model = clamp(build_rbm(3, 2, 4), 0, 0);
    const auto eval = evaluate_free_energy(model, cfg, rng);
    EXPECT_EQ(calls, 1);
    // A single all-ones read: zero entropy, energy of the zero model.
    EXPECT_DOUBLE_EQ(eval.free_energy, 0.0);
    EXPECT_FALSE(eval.quantum);
}

TEST(agent, rbm_solves_small_grid) {
    std::istringstream map("R.\n..\n");
    const auto env = GridWorld::parse(map);
    const auto optimal = value_iteration(env).optimal;
    AgentConfig cfg;
    cfg.learning_rate = 0.04;
    cfg.training_samples = 300;
    int solved = 0;
    const int runs = 20;
    for (int r = 0; r < runs; ++r) {
        Rng rng(mix_seed(100, static_cast<std::uint64_t>(r)));
        const auto topo = init_weights(build_rbm(env.state_count(), kActionCount, 16), rng, 25.0);
        const auto run = train(env, topo, cfg, mix_seed(200, static_cast<std::uint64_t>(r)));
        solved += policy_fidelity(run.history.snapshots.back(), optimal) == 1.0;
    }
    EXPECT_GE(solved, 18);
}

TEST(agent, config_validation) {
    AgentConfig cfg;
    cfg.learning_rate = -1.0;
    EXPECT_THROW(cfg.validate(), ContractError);
    cfg = {};
    cfg.backend = Backend::sqa;
    cfg.virtual_params.gamma = 0.0;
    EXPECT_THROW(cfg.validate(), ContractError);
    cfg = {};
    cfg.discount = 1.0;
    EXPECT_THROW(cfg.validate(), ContractError);
}

}  // namespace ferl
