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

#include <cstddef>
#include <vector>

#include "ferl/ising.hpp"
#include "ferl/samplers.hpp"

namespace ferl {

/// Plug-in free energy: value = mean_energy + entropy_term, where
/// entropy_term = (1/beta) * sum_c p(c) ln p(c) over the distinct
/// configurations c observed in the pool (p = empirical frequency).
struct FreeEnergyEstimate {
    double value = 0.0;
    double mean_energy = 0.0;
    double entropy_term = 0.0;
    std::size_t support_size = 0;
};

/// <s^z_h> per hidden node and <s^z_h s^z_h'> per model coupling (same order
/// as ClampedModel::couplings()). Averages run over entries and replicas.
struct ObservableEstimate {
    std::vector<double> sigma_z;
    std::vector<double> sigma_zz;
};

/// Binary-encoding moments <h> and <h h'> (h = (s + 1) / 2), in [0, 1].
struct ClassicalMoments {
    std::vector<double> h;
    std::vector<double> hh;
};

ObservableEstimate estimate_observables(const SamplePool& pool, const ClampedModel& model);
ClassicalMoments estimate_classical_moments(const SamplePool& pool, const ClampedModel& model);

/// Plug-in estimate over r-replica configurations using effective_energy.
FreeEnergyEstimate estimate_effective_free_energy(const ClampedModel& model, const SamplePool& pool,
                                                  const TfimParameters& params);

/// Plug-in estimate over single +-1 reads converted to binary and scored
/// with classical_energy.
FreeEnergyEstimate estimate_classical_free_energy(const ClampedModel& model, const SamplePool& pool, double beta);

/// Closed form for a coupling-free model, binary hidden units:
/// F = -(1/beta) sum_h ln(1 + exp(beta b_h)). Throws "not an RBM" otherwise.
double rbm_free_energy(const ClampedModel& model, double beta);
/// <h> = logistic(beta b_h) for the same model.
std::vector<double> rbm_hidden_expectations(const ClampedModel& model, double beta);

/// -(1/beta) ln tr exp(-beta H) by dense diagonalization of tfim_matrix.
double exact_quantum_free_energy(const ClampedModel& model, const TfimParameters& params);

/// -(1/beta) ln sum exp(-beta E) over all 2^n configurations, E being
/// classical_energy (binary) or spin_energy (spin).
double exact_classical_free_energy(const ClampedModel& model, double beta,
                                   SpinConvention convention = SpinConvention::spin);

/// Boltzmann probabilities indexed by configuration x, where bit i of x is
/// h_i (equivalently s_i = +1).
std::vector<double> exact_boltzmann_distribution(const ClampedModel& model, double beta,
                                                 SpinConvention convention = SpinConvention::spin);

/// Exact Gibbs-state <s^z> and <s^z s^z> of the TFIM.
ObservableEstimate exact_gibbs_observables(const ClampedModel& model, const TfimParameters& params);

/// Suzuki-Trotter normalization omitted from the effective Hamiltonian:
/// Z_quantum ~ C * Z_effective with
/// -(1/beta) ln C = -(r n / (2 beta)) ln(sinh(2 beta gamma / r) / 2).
/// Adding this to an effective free energy gives the quantum free energy.
double trotter_free_energy_offset(const TfimParameters& params, std::size_t hidden_count);

}  // namespace ferl
