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

#include "ferl/free_energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

#include "ferl/errors.hpp"

namespace ferl {

namespace {

void require_width(const SamplePool& pool, const ClampedModel& model, const char* who) {
    if (pool.empty()) throw ContractError(std::string(who) + ": empty pool");
    if (pool.width() != model.hidden_count()) {
        throw ContractError(std::string(who) + ": pool width does not match hidden count");
    }
}

// Sorts entry indices lexicographically and returns sum p ln p over the
// distinct entries, together with their number.
std::pair<double, std::size_t> plug_in_neg_entropy(const SamplePool& pool) {
    const std::size_t n = pool.size();
    const std::size_t len = pool.entry_size();
    const std::int8_t* base = pool.spins().data();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::memcmp(base + a * len, base + b * len, len) < 0;
    });
    double sum = 0.0;
    std::size_t distinct = 0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i < n && std::memcmp(base + order[i - 1] * len, base + order[i] * len, len) == 0) {
            ++run;
            continue;
        }
        const double p = static_cast<double>(run) / static_cast<double>(n);
        sum += p * std::log(p);
        ++distinct;
        run = 1;
    }
    return {sum, distinct};
}

}  // namespace

ObservableEstimate estimate_observables(const SamplePool& pool, const ClampedModel& model) {
    require_width(pool, model, "estimate_observables");
    const std::size_t n = model.hidden_count();
    const auto couplings = model.couplings();
    std::vector<long long> z(n, 0);
    std::vector<long long> zz(couplings.size(), 0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto e = pool.entry(i);
        for (std::size_t k = 0; k < pool.replicas(); ++k) {
            const std::int8_t* row = e.data() + k * n;
            for (std::size_t h = 0; h < n; ++h) z[h] += row[h];
            for (std::size_t c = 0; c < couplings.size(); ++c) zz[c] += row[couplings[c].first] * row[couplings[c].second];
        }
    }
    const double count = static_cast<double>(pool.size() * pool.replicas());
    ObservableEstimate out;
    out.sigma_z.resize(n);
    out.sigma_zz.resize(couplings.size());
    for (std::size_t h = 0; h < n; ++h) out.sigma_z[h] = static_cast<double>(z[h]) / count;
    for (std::size_t c = 0; c < couplings.size(); ++c) out.sigma_zz[c] = static_cast<double>(zz[c]) / count;
    return out;
}

ClassicalMoments estimate_classical_moments(const SamplePool& pool, const ClampedModel& model) {
    require_width(pool, model, "estimate_classical_moments");
    const std::size_t n = model.hidden_count();
    const auto couplings = model.couplings();
    std::vector<long long> ones(n, 0);
    std::vector<long long> pairs(couplings.size(), 0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto e = pool.entry(i);
        for (std::size_t k = 0; k < pool.replicas(); ++k) {
            const std::int8_t* row = e.data() + k * n;
            for (std::size_t h = 0; h < n; ++h) ones[h] += row[h] > 0;
            for (std::size_t c = 0; c < couplings.size(); ++c) {
                pairs[c] += row[couplings[c].first] > 0 && row[couplings[c].second] > 0;
            }
        }
    }
    const double count = static_cast<double>(pool.size() * pool.replicas());
    ClassicalMoments out;
    out.h.resize(n);
    out.hh.resize(couplings.size());
    for (std::size_t h = 0; h < n; ++h) out.h[h] = static_cast<double>(ones[h]) / count;
    for (std::size_t c = 0; c < couplings.size(); ++c) out.hh[c] = static_cast<double>(pairs[c]) / count;
    return out;
}

FreeEnergyEstimate estimate_effective_free_energy(const ClampedModel& model, const SamplePool& pool,
                                                  const TfimParameters& params) {
    require_width(pool, model, "estimate_effective_free_energy");
    if (pool.replicas() != params.replicas) {
        throw ContractError("estimate_effective_free_energy: pool replica count does not match parameters");
    }
    double energy = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) energy += effective_energy(model, pool.entry(i), params);
    const auto [neg_entropy, distinct] = plug_in_neg_entropy(pool);
    FreeEnergyEstimate out;
    out.mean_energy = energy / static_cast<double>(pool.size());
    out.entropy_term = neg_entropy / params.beta;
    out.value = out.mean_energy + out.entropy_term;
    out.support_size = distinct;
    return out;
}

FreeEnergyEstimate estimate_classical_free_energy(const ClampedModel& model, const SamplePool& pool, double beta) {
    require_width(pool, model, "estimate_classical_free_energy");
    if (pool.replicas() != 1) throw ContractError("estimate_classical_free_energy: expected single-replica reads");
    if (!(beta > 0.0)) throw ContractError("estimate_classical_free_energy: beta must be > 0");
    double energy = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) energy += classical_energy(model, to_binary(pool.entry(i)));
    const auto [neg_entropy, distinct] = plug_in_neg_entropy(pool);
    FreeEnergyEstimate out;
    out.mean_energy = energy / static_cast<double>(pool.size());
    out.entropy_term = neg_entropy / beta;
    out.value = out.mean_energy + out.entropy_term;
    out.support_size = distinct;
    return out;
}

namespace {

void require_rbm(const ClampedModel& model, double beta) {
    for (const auto& c : model.couplings()) {
        if (c.weight != 0.0) throw ContractError("not an RBM: hidden-hidden couplings present");
    }
    if (!(beta > 0.0)) throw ContractError("beta must be > 0");
}

// ln(1 + e^x) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

double rbm_free_energy(const ClampedModel& model, double beta) {
    require_rbm(model, beta);
    double sum = 0.0;
    for (double b : model.biases()) sum += softplus(beta * b);
    return -sum / beta;
}

std::vector<double> rbm_hidden_expectations(const ClampedModel& model, double beta) {
    require_rbm(model, beta);
    std::vector<double> out;
    out.reserve(model.hidden_count());
    for (double b : model.biases()) out.push_back(1.0 / (1.0 + std::exp(-beta * b)));
    return out;
}

double exact_quantum_free_energy(const ClampedModel& model, const TfimParameters& params) {
    params.validate();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tfim_matrix(model, params.gamma),
                                                                Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    const double e0 = ev.minCoeff();
    double z = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) z += std::exp(-params.beta * (ev[i] - e0));
    return e0 - std::log(z) / params.beta;
}

namespace {

std::vector<double> enumerate_energies(const ClampedModel& model, SpinConvention convention) {
    const std::size_t n = model.hidden_count();
    if (n > kOracleHiddenLimit + 8) throw ContractError("enumeration: too many hidden nodes");
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> energies(dim);
    BinaryConfiguration bits(n);
    SpinConfiguration spins(n);
    for (std::size_t x = 0; x < dim; ++x) {
        for (std::size_t i = 0; i < n; ++i) {
            bits[i] = static_cast<std::uint8_t>((x >> i) & 1U);
            spins[i] = bits[i] ? 1 : -1;
        }
        energies[x] = convention == SpinConvention::binary ? classical_energy(model, bits) : spin_energy(model, spins);
    }
    return energies;
}

}  // namespace

double exact_classical_free_energy(const ClampedModel& model, double beta, SpinConvention convention) {
    if (!(beta > 0.0)) throw ContractError("beta must be > 0");
    const auto energies = enumerate_energies(model, convention);
    const double e0 = *std::min_element(energies.begin(), energies.end());
    double z = 0.0;
    for (double e : energies) z += std::exp(-beta * (e - e0));
    return e0 - std::log(z) / beta;
}

std::vector<double> exact_boltzmann_distribution(const ClampedModel& model, double beta,
                                                 SpinConvention convention) {
    if (!(beta > 0.0)) throw ContractError("beta must be > 0");
    auto p = enumerate_energies(model, convention);
    const double e0 = *std::min_element(p.begin(), p.end());
    double z = 0.0;
    for (double& e : p) z += (e = std::exp(-beta * (e - e0)));
    for (double& e : p) e /= z;
    return p;
}

ObservableEstimate exact_gibbs_observables(const ClampedModel& model, const TfimParameters& params) {
    params.validate();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tfim_matrix(model, params.gamma));
    const auto& ev = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    const double e0 = ev.minCoeff();
    Eigen::VectorXd weights = (-params.beta * (ev.array() - e0)).exp();
    weights /= weights.sum();
    // Diagonal of rho in the computational basis.
    const Eigen::VectorXd diag = (vecs.array().square().matrix() * weights);

    const std::size_t n = model.hidden_count();
    const auto couplings = model.couplings();
    ObservableEstimate out;
    out.sigma_z.assign(n, 0.0);
    out.sigma_zz.assign(couplings.size(), 0.0);
    for (Eigen::Index x = 0; x < diag.size(); ++x) {
        auto spin = [x](std::size_t i) { return ((static_cast<std::size_t>(x) >> i) & 1U) ? 1.0 : -1.0; };
        for (std::size_t i = 0; i < n; ++i) out.sigma_z[i] += diag[x] * spin(i);
        for (std::size_t c = 0; c < couplings.size(); ++c) {
            out.sigma_zz[c] += diag[x] * spin(couplings[c].first) * spin(couplings[c].second);
        }
    }
    return out;
}

double trotter_free_energy_offset(const TfimParameters& params, std::size_t hidden_count) {
    params.validate();
    if (params.gamma == 0.0) throw ContractError("trotter_free_energy_offset: gamma must be > 0");
    const double r = static_cast<double>(params.replicas);
    const double c = std::log(0.5 * std::sinh(2.0 * params.beta * params.gamma / r));
    return -(r * static_cast<double>(hidden_count) / (2.0 * params.beta)) * c;
}

}  // namespace ferl
