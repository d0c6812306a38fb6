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

// Feed-forward Q-network baseline trained with one TD(0) gradient step per
// transition. Sigmoid hidden layers, identity output layer, plain SGD.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ferl/gridworld.hpp"
#include "ferl/random.hpp"

namespace ferl {

class Mlp {
   public:
    struct Layer {
        Eigen::MatrixXd weights;  // out x in
        Eigen::VectorXd bias;
    };

    /// Zero-initialized network with the given layer widths (input first).
    explicit Mlp(std::span<const std::size_t> widths);
    /// Weights and biases uniform in [-scale, scale].
    static Mlp random(std::span<const std::size_t> widths, Rng& rng, double scale);

    std::size_t input_width() const { return static_cast<std::size_t>(layers_.front().weights.cols()); }
    std::size_t output_width() const { return static_cast<std::size_t>(layers_.back().weights.rows()); }

    std::vector<Layer>& layers() noexcept { return layers_; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }

    Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

   private:
    std::vector<Layer> layers_;
};

struct DqnTransition {
    Eigen::VectorXd state;
    std::size_t action = 0;
    double reward = 0.0;
    Eigen::VectorXd next_state;
};

/// r + discount * max_a' Q(s', a'), evaluated with the current network.
double td0_target(const Mlp& mlp, const DqnTransition& t, double discount);
/// 0.5 * (target - Q(s, a))^2 with the target supplied as a constant.
double td0_loss(const Mlp& mlp, const DqnTransition& t, double target);
/// Backprop gradient of td0_loss with respect to every weight and bias.
std::vector<Mlp::Layer> td0_loss_gradient(const Mlp& mlp, const DqnTransition& t, double target);
/// theta <- theta - learning_rate * grad; returns the TD error used.
double td0_gradient_step(Mlp& mlp, const DqnTransition& t, double learning_rate, double discount);

struct DqnConfig {
    std::vector<std::size_t> widths{14, 8, 8, 5};
    double learning_rate = 0.01;
    double discount = 0.8;
    std::size_t training_samples = 500;
    double explore = 0.3;
    double init_scale = 0.1;

    void validate() const;
};

/// Same sampling and snapshot regime as the FERL trainer.
TrainingHistory train_dqn(const GridWorld& env, const DqnConfig& config, std::uint64_t seed);

}  // namespace ferl
