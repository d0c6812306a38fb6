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

#include "ferl/ising.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "ferl/errors.hpp"

namespace ferl {

ClampedModel::ClampedModel(std::vector<double> biases, std::vector<Coupling> couplings)
    : biases_(std::move(biases)), couplings_(std::move(couplings)) {
    for (double b : biases_) {
        if (!std::isfinite(b)) throw ContractError("ClampedModel: non-finite bias");
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto& c : couplings_) {
        if (c.first > c.second) std::swap(c.first, c.second);
        if (c.first == c.second) throw ContractError("ClampedModel: self coupling on hidden node " + std::to_string(c.first));
        if (c.second >= biases_.size()) throw ContractError("ClampedModel: coupling references unknown hidden node");
        if (!std::isfinite(c.weight)) throw ContractError("ClampedModel: non-finite coupling");
        if (!seen.emplace(c.first, c.second).second) throw ContractError("ClampedModel: duplicate coupling");
    }
}

void TfimParameters::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ContractError("TfimParameters: beta must be > 0");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ContractError("TfimParameters: gamma must be >= 0");
    if (replicas < 1) throw ContractError("TfimParameters: replicas must be >= 1");
}

EffectiveConfiguration::EffectiveConfiguration(std::size_t replicas, std::size_t width,
                                               std::vector<std::int8_t> spins)
    : replicas_(replicas), width_(width), spins_(std::move(spins)) {
    if (spins_.size() != replicas_ * width_) throw ContractError("EffectiveConfiguration: size is not replicas * width");
}

EffectiveConfiguration EffectiveConfiguration::from_rows(std::span<const SpinConfiguration> rows) {
    if (rows.empty()) throw ContractError("EffectiveConfiguration: no replicas");
    const std::size_t width = rows.front().size();
    std::vector<std::int8_t> spins;
    spins.reserve(rows.size() * width);
    for (const auto& row : rows) {
        if (row.size() != width) throw ContractError("EffectiveConfiguration: ragged replicas");
        spins.insert(spins.end(), row.begin(), row.end());
    }
    return {rows.size(), width, std::move(spins)};
}

BinaryConfiguration to_binary(std::span<const std::int8_t> spins) {
    BinaryConfiguration out(spins.size());
    std::transform(spins.begin(), spins.end(), out.begin(),
                   [](std::int8_t s) { return static_cast<std::uint8_t>((s + 1) / 2); });
    return out;
}

SpinConfiguration to_spin(std::span<const std::uint8_t> bits) {
    SpinConfiguration out(bits.size());
    std::transform(bits.begin(), bits.end(), out.begin(),
                   [](std::uint8_t b) { return static_cast<std::int8_t>(2 * b - 1); });
    return out;
}

namespace {

template <typename T>
double ising_form(const ClampedModel& model, std::span<const T> config) {
    if (config.size() != model.hidden_count()) {
        throw ContractError("energy: configuration length " + std::to_string(config.size()) +
                            " does not match hidden count " + std::to_string(model.hidden_count()));
    }
    double e = 0.0;
    const auto biases = model.biases();
    for (std::size_t h = 0; h < biases.size(); ++h) e -= biases[h] * config[h];
    for (const auto& c : model.couplings()) e -= c.weight * config[c.first] * config[c.second];
    return e;
}

}  // namespace

double classical_energy(const ClampedModel& model, std::span<const std::uint8_t> config) {
    return ising_form(model, config);
}

double spin_energy(const ClampedModel& model, std::span<const std::int8_t> config) {
    return ising_form(model, config);
}

double replica_coupling(const TfimParameters& params) {
    params.validate();
    if (params.gamma == 0.0) {
        throw ContractError("classical limit: effective-model construction undefined (gamma = 0)");
    }
    const double x = params.gamma * params.beta / static_cast<double>(params.replicas);
    // ln coth(x) = -ln tanh(x); tanh keeps precision for small and large x.
    return -std::log(std::tanh(x)) / (2.0 * params.beta);
}

double effective_energy(const ClampedModel& model, std::span<const std::int8_t> spins,
                        const TfimParameters& params) {
    const double w_plus = replica_coupling(params);
    const std::size_t n = model.hidden_count();
    const std::size_t r = params.replicas;
    if (spins.size() != r * n) {
        throw ContractError("effective_energy: expected " + std::to_string(r) + " replicas of width " +
                            std::to_string(n));
    }
    const auto biases = model.biases();
    double intra = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
        const std::int8_t* row = spins.data() + k * n;
        for (std::size_t h = 0; h < n; ++h) intra -= biases[h] * row[h];
        for (const auto& c : model.couplings()) intra -= c.weight * row[c.first] * row[c.second];
    }
    double chain = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
        for (std::size_t k = 0; k + 1 < r; ++k) chain += spins[k * n + h] * spins[(k + 1) * n + h];
        chain += spins[h] * spins[(r - 1) * n + h];
    }
    return intra / static_cast<double>(r) - w_plus * chain;
}

double effective_energy(const ClampedModel& model, const EffectiveConfiguration& config,
                        const TfimParameters& params) {
    if (config.replicas() != params.replicas || config.width() != model.hidden_count()) {
        throw ContractError("effective_energy: configuration shape does not match model/replicas");
    }
    return effective_energy(model, config.spins(), params);
}

Eigen::MatrixXd tfim_matrix(const ClampedModel& model, double gamma, std::size_t limit) {
    const std::size_t n = model.hidden_count();
    if (n > limit) {
        throw ContractError("tfim_matrix: " + std::to_string(n) + " hidden nodes exceeds oracle limit " +
                            std::to_string(limit));
    }
    const std::size_t dim = std::size_t{1} << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    SpinConfiguration spins(n);
    for (std::size_t x = 0; x < dim; ++x) {
        for (std::size_t i = 0; i < n; ++i) spins[i] = ((x >> i) & 1U) ? 1 : -1;
        const auto xi = static_cast<Eigen::Index>(x);
        h(xi, xi) = spin_energy(model, spins);
        for (std::size_t i = 0; i < n; ++i) {
            h(xi, static_cast<Eigen::Index>(x ^ (std::size_t{1} << i))) -= gamma;
        }
    }
    return h;
}

}  // namespace ferl
