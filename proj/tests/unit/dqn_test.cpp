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

#include "ferl/dqn.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ferl/errors.hpp"

namespace ferl {
namespace {

DqnTransition random_transition(Rng& rng, std::size_t in, std::size_t out) {
    DqnTransition t;
    t.state = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(in));
    t.next_state = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(in));
    t.state[static_cast<Eigen::Index>(uniform_index(rng, in))] = 1.0;
    t.next_state[static_cast<Eigen::Index>(uniform_index(rng, in))] = 1.0;
    t.action = uniform_index(rng, out);
    t.reward = 100.0 * uniform01(rng);
    return t;
}

}  // namespace

TEST(dqn, zero_network_outputs_zero) {
    const std::vector<std::size_t> widths{4, 3, 2};
    const Mlp mlp(widths);
    EXPECT_EQ(mlp.input_width(), 4U);
    EXPECT_EQ(mlp.output_width(), 2U);
    EXPECT_TRUE(mlp.forward(Eigen::VectorXd::Ones(4)).isZero());
}

TEST(dqn, two_two_one_hand_fixture) {
    const std::vector<std::size_t> widths{2, 2, 1};
    Mlp mlp(widths);
    auto& l = mlp.layers();
    l[0].weights << 0.5, -1.0, 2.0, 0.25;
    l[0].bias << 0.1, -0.2;
    l[1].weights << 1.5, -0.5;
    l[1].bias << 0.3;
    const Eigen::Vector2d x(1.0, 2.0);
    auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
    const double a0 = sig(0.5 * 1.0 - 1.0 * 2.0 + 0.1);
    const double a1 = sig(2.0 * 1.0 + 0.25 * 2.0 - 0.2);
    EXPECT_NEAR(mlp.forward(x)[0], 1.5 * a0 - 0.5 * a1 + 0.3, 1e-15);

    DqnTransition t{x, 0, 1.0, x};
    const double q = 1.5 * a0 - 0.5 * a1 + 0.3;
    const double target = 2.0;
    const auto grad = td0_loss_gradient(mlp, t, target);
    EXPECT_NEAR(grad[1].bias[0], q - target, 1e-14);
    EXPECT_NEAR(grad[1].weights(0, 1), (q - target) * a1, 1e-14);
    EXPECT_NEAR(grad[0].weights(0, 1), (q - target) * 1.5 * a0 * (1 - a0) * 2.0, 1e-14);
    EXPECT_NEAR(td0_loss(mlp, t, target), 0.5 * (target - q) * (target - q), 1e-14);
}

TEST(dqn, gradient_matches_finite_differences) {
    Rng rng(21);
    const std::vector<std::size_t> widths{6, 5, 4, 3};
    for (int trial = 0; trial < 10; ++trial) {
        Mlp mlp = Mlp::random(widths, rng, 1.0);
        const auto t = random_transition(rng, 6, 3);
        const double target = td0_target(mlp, t, 0.8);
        const auto grad = td0_loss_gradient(mlp, t, target);
        const double h = 1e-6;
        for (std::size_t li = 0; li < mlp.layers().size(); ++li) {
            auto& w = mlp.layers()[li].weights;
            for (Eigen::Index i = 0; i < w.size(); ++i) {
                const double saved = w.data()[i];
                w.data()[i] = saved + h;
                const double up = td0_loss(mlp, t, target);
                w.data()[i] = saved - h;
                const double down = td0_loss(mlp, t, target);
                w.data()[i] = saved;
                const double fd = (up - down) / (2.0 * h);
                EXPECT_NEAR(grad[li].weights.data()[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
            }
            auto& b = mlp.layers()[li].bias;
            for (Eigen::Index i = 0; i < b.size(); ++i) {
                const double saved = b[i];
                b[i] = saved + h;
                const double up = td0_loss(mlp, t, target);
                b[i] = saved - h;
                const double down = td0_loss(mlp, t, target);
                b[i] = saved;
                const double fd = (up - down) / (2.0 * h);
                EXPECT_NEAR(grad[li].bias[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
            }
        }
    }
}

TEST(dqn, hidden_permutation_leaves_output_unchanged) {
    Rng rng(22);
    const std::vector<std::size_t> widths{4, 3, 2};
    Mlp mlp = Mlp::random(widths, rng, 1.0);
    Mlp permuted = mlp;
    Eigen::PermutationMatrix<3> p;
    p.indices() << 2, 0, 1;
    permuted.layers()[0].weights = p * mlp.layers()[0].weights;
    permuted.layers()[0].bias = p * mlp.layers()[0].bias;
    permuted.layers()[1].weights = mlp.layers()[1].weights * p.transpose();
    const Eigen::Vector4d x(0.3, -1.0, 0.5, 2.0);
    EXPECT_LT((mlp.forward(x) - permuted.forward(x)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(dqn, gradient_step_reduces_loss) {
    Rng rng(23);
    const std::vector<std::size_t> widths{5, 4, 3};
    Mlp mlp = Mlp::random(widths, rng, 0.5);
    const auto t = random_transition(rng, 5, 3);
    const double target = td0_target(mlp, t, 0.8);
    const double before = td0_loss(mlp, t, target);
    td0_gradient_step(mlp, t, 1e-3, 0.8);
    EXPECT_LT(td0_loss(mlp, t, target), before);
}

TEST(dqn, training_is_deterministic) {
    const auto env = GridWorld::canonical();
    DqnConfig cfg;
    cfg.training_samples = 50;
    const auto a = train_dqn(env, cfg, 5);
    const auto b = train_dqn(env, cfg, 5);
    EXPECT_EQ(a.snapshots, b.snapshots);
    EXPECT_EQ(a.td_errors, b.td_errors);
    EXPECT_EQ(a.snapshots.size(), 50U);
}

TEST(dqn, config_validation) {
    DqnConfig cfg;
    cfg.learning_rate = 0.0;
    EXPECT_THROW(cfg.validate(), ContractError);
    cfg = {};
    cfg.explore = 1.5;
    EXPECT_THROW(cfg.validate(), ContractError);
    const std::vector<std::size_t> bad{3};
    EXPECT_THROW(Mlp{bad}, ContractError);
}

}  // namespace ferl
