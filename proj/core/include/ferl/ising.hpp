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

// Energy functions of clamped Boltzmann machines.
//
// Two spin conventions coexist and are kept strictly apart:
//   * binary h in {0, 1}   -- classical GBM energy (classical_energy)
//   * spin   s in {-1, +1} -- TFIM, Suzuki-Trotter model, every sampler output
// The only bridge between them is h = (s + 1) / 2 (to_binary / to_spin).

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ferl {

enum class NodeKind : std::uint8_t { state_visible, action_visible, hidden };

struct NodeId {
    std::size_t index = 0;
    NodeKind kind = NodeKind::hidden;

    friend bool operator==(const NodeId&, const NodeId&) = default;
};

/// Undirected hidden-hidden edge; first < second.
struct Coupling {
    std::size_t first = 0;
    std::size_t second = 0;
    double weight = 0.0;

    friend bool operator==(const Coupling&, const Coupling&) = default;
};

/// Hidden-only Ising problem left after folding fixed visible values into
/// the hidden biases. Immutable once built.
class ClampedModel {
   public:
    ClampedModel() = default;
    /// Throws ContractError on out-of-range or self couplings, duplicate
    /// pairs, or non-finite values. Pairs are normalized to first < second.
    ClampedModel(std::vector<double> biases, std::vector<Coupling> couplings);

    std::size_t hidden_count() const noexcept { return biases_.size(); }
    std::span<const double> biases() const noexcept { return biases_; }
    std::span<const Coupling> couplings() const noexcept { return couplings_; }

   private:
    std::vector<double> biases_;
    std::vector<Coupling> couplings_;
};

struct TfimParameters {
    double gamma = 0.5;        // transverse field
    double beta = 2.0;         // inverse temperature
    std::size_t replicas = 25;  // Trotter slices

    /// Checks beta > 0, gamma >= 0, replicas >= 1.
    void validate() const;
};

using BinaryConfiguration = std::vector<std::uint8_t>;
using SpinConfiguration = std::vector<std::int8_t>;

/// r x n matrix of +-1 spins stored row-major; row k is Trotter replica k.
class EffectiveConfiguration {
   public:
    EffectiveConfiguration() = default;
    EffectiveConfiguration(std::size_t replicas, std::size_t width, std::vector<std::int8_t> spins);
    /// Stacks rows; all must share one width.
    static EffectiveConfiguration from_rows(std::span<const SpinConfiguration> rows);

    std::size_t replicas() const noexcept { return replicas_; }
    std::size_t width() const noexcept { return width_; }
    std::span<const std::int8_t> spins() const noexcept { return spins_; }
    std::span<const std::int8_t> row(std::size_t k) const { return {spins_.data() + k * width_, width_}; }

   private:
    std::size_t replicas_ = 0;
    std::size_t width_ = 0;
    std::vector<std::int8_t> spins_;
};

BinaryConfiguration to_binary(std::span<const std::int8_t> spins);
SpinConfiguration to_spin(std::span<const std::uint8_t> bits);

/// -sum_h b_h h - sum_{hh'} w_hh' h h' over binary h.
double classical_energy(const ClampedModel& model, std::span<const std::uint8_t> config);

/// Same expression over +-1 spins: the diagonal of the TFIM at gamma = 0.
double spin_energy(const ClampedModel& model, std::span<const std::int8_t> config);

/// Ferromagnetic coupling between neighbouring Trotter replicas,
/// w+ = ln(coth(gamma * beta / r)) / (2 beta). Throws for gamma == 0.
double replica_coupling(const TfimParameters& params);

/// Energy of the classical (r x n) Suzuki-Trotter model. Intra-replica terms
/// are scaled by 1/r. The replica chain is sum_{k<r} h_k h_{k+1} plus the
/// closing bond h_1 h_r, taken literally: for r = 2 the single bond counts
/// twice and for r = 1 the closure is the constant h_1 h_1 = 1.
double effective_energy(const ClampedModel& model, const EffectiveConfiguration& config,
                        const TfimParameters& params);

/// Flat-span overload used on sample pools; spins.size() must equal r * n.
double effective_energy(const ClampedModel& model, std::span<const std::int8_t> spins,
                        const TfimParameters& params);

/// Largest hidden count accepted by the dense matrix oracles.
inline constexpr std::size_t kOracleHiddenLimit = 12;

/// Dense TFIM Hamiltonian -sum b s^z - sum w s^z s^z - gamma sum s^x.
/// Basis index x encodes qubit i in bit i, with s^z_i = 2 * bit_i - 1.
Eigen::MatrixXd tfim_matrix(const ClampedModel& model, double gamma,
                            std::size_t limit = kOracleHiddenLimit);

}  // namespace ferl
