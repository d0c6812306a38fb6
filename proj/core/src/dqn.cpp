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

#include <cmath>

#include "ferl/agent.hpp"
#include "ferl/errors.hpp"

namespace ferl {

Mlp::Mlp(std::span<const std::size_t> widths) {
    if (widths.size() < 2) throw ContractError("Mlp: need at least input and output widths");
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        if (widths[i] == 0 || widths[i + 1] == 0) throw ContractError("Mlp: widths must be positive");
        const auto out = static_cast<Eigen::Index>(widths[i + 1]);
        const auto in = static_cast<Eigen::Index>(widths[i]);
        layers_.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
    }
}

Mlp Mlp::random(std::span<const std::size_t> widths, Rng& rng, double scale) {
    if (!(scale >= 0.0)) throw ContractError("Mlp::random: scale must be >= 0");
    Mlp mlp(widths);
    auto draw = [&] { return scale * (2.0 * uniform01(rng) - 1.0); };
    for (auto& layer : mlp.layers_) {
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = draw();
        }
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias[r] = draw();
    }
    return mlp;
}

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) { return (1.0 + (-x.array()).exp()).inverse().matrix(); }

// Activations of every layer, input included.
std::vector<Eigen::VectorXd> forward_all(const Mlp& mlp, const Eigen::VectorXd& input) {
    const auto& layers = mlp.layers();
    if (static_cast<std::size_t>(input.size()) != mlp.input_width()) throw ContractError("Mlp: input width mismatch");
    std::vector<Eigen::VectorXd> acts{input};
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Eigen::VectorXd z = layers[l].weights * acts.back() + layers[l].bias;
        acts.push_back(l + 1 == layers.size() ? z : sigmoid(z));
    }
    return acts;
}

}  // namespace

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const { return forward_all(*this, input).back(); }

double td0_target(const Mlp& mlp, const DqnTransition& t, double discount) {
    return t.reward + discount * mlp.forward(t.next_state).maxCoeff();
}

double td0_loss(const Mlp& mlp, const DqnTransition& t, double target) {
    const double diff = target - mlp.forward(t.state)[static_cast<Eigen::Index>(t.action)];
    return 0.5 * diff * diff;
}

std::vector<Mlp::Layer> td0_loss_gradient(const Mlp& mlp, const DqnTransition& t, double target) {
    const auto& layers = mlp.layers();
    const auto acts = forward_all(mlp, t.state);
    if (t.action >= mlp.output_width()) throw ContractError("td0_loss_gradient: action out of range");

    std::vector<Mlp::Layer> grad(layers.size());
    // dL/dz at the output: only the taken action contributes.
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mlp.output_width()));
    delta[static_cast<Eigen::Index>(t.action)] = acts.back()[static_cast<Eigen::Index>(t.action)] - target;
    for (std::size_t l = layers.size(); l-- > 0;) {
        grad[l].weights = delta * acts[l].transpose();
        grad[l].bias = delta;
        if (l == 0) break;
        const Eigen::VectorXd& a = acts[l];
        delta = ((layers[l].weights.transpose() * delta).array() * a.array() * (1.0 - a.array())).matrix();
    }
    return grad;
}

double td0_gradient_step(Mlp& mlp, const DqnTransition& t, double learning_rate, double discount) {
    const double target = td0_target(mlp, t, discount);
    const double td_error = target - mlp.forward(t.state)[static_cast<Eigen::Index>(t.action)];
    const auto grad = td0_loss_gradient(mlp, t, target);
    for (std::size_t l = 0; l < grad.size(); ++l) {
        mlp.layers()[l].weights -= learning_rate * grad[l].weights;
        mlp.layers()[l].bias -= learning_rate * grad[l].bias;
    }
    return td_error;
}

void DqnConfig::validate() const {
    if (widths.size() < 2) throw ContractError("dqn: need at least two layer widths");
    if (!(learning_rate > 0.0)) throw ContractError("dqn: learning rate must be > 0");
    if (!(discount > 0.0 && discount < 1.0)) throw ContractError("dqn: discount must lie in (0, 1)");
    if (training_samples < 1) throw ContractError("dqn: training_samples must be >= 1");
    if (!(explore >= 0.0 && explore <= 1.0)) throw ContractError("dqn: explore must lie in [0, 1]");
}

TrainingHistory train_dqn(const GridWorld& env, const DqnConfig& config, std::uint64_t seed) {
    config.validate();
    if (config.widths.front() != env.state_count() || config.widths.back() != kActionCount) {
        throw ContractError("train_dqn: network widths do not match the environment");
    }
    Rng rng(seed);
    Mlp mlp = Mlp::random(config.widths, rng, config.init_scale);

    std::vector<Eigen::VectorXd> encodings;
    for (std::size_t s = 0; s < env.state_count(); ++s) {
        encodings.push_back(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(env.state_count()),
                                                  static_cast<Eigen::Index>(s)));
    }
    auto q_row = [&](std::size_t s) {
        const Eigen::VectorXd q = mlp.forward(encodings[s]);
        return std::vector<double>(q.data(), q.data() + q.size());
    };

    TrainingHistory history;
    for (std::size_t i = 0; i < config.training_samples; ++i) {
        const std::size_t s = uniform_index(rng, env.state_count());
        const std::size_t a = select_action(q_row(s), config.explore, rng);
        const auto step = env.step(s, kActions[a]);
        const DqnTransition t{encodings[s], a, step.reward, encodings[step.next_state]};
        history.td_errors.push_back(td0_gradient_step(mlp, t, config.learning_rate, config.discount));

        PolicyTable snapshot(env.state_count());
        for (std::size_t p = 0; p < env.state_count(); ++p) {
            snapshot[p] = static_cast<std::uint8_t>(greedy_action(q_row(p), rng));
        }
        history.snapshots.push_back(std::move(snapshot));
    }
    return history;
}

}  // namespace ferl
