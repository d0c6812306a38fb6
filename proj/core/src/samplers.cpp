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

#include "ferl/samplers.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "ferl/errors.hpp"

namespace ferl {

void AnnealSchedule::validate() const {
    if (sweeps < 1) throw ContractError("AnnealSchedule: sweeps must be >= 1");
    if (!std::isfinite(initial_value) || !std::isfinite(final_value)) {
        throw ContractError("AnnealSchedule: values must be finite");
    }
}

double AnnealSchedule::value_at(std::size_t sweep) const {
    if (sweeps <= 1) return final_value;
    const double t = static_cast<double>(sweep) / static_cast<double>(sweeps - 1);
    return initial_value + (final_value - initial_value) * t;
}

SamplePool::SamplePool(PoolSource source, std::size_t width, std::size_t replicas)
    : source_(source), width_(width), replicas_(replicas) {
    if (replicas_ < 1) throw ContractError("SamplePool: replicas must be >= 1");
}

EffectiveConfiguration SamplePool::effective(std::size_t i) const {
    auto e = entry(i);
    return {replicas_, width_, std::vector<std::int8_t>(e.begin(), e.end())};
}

void SamplePool::add(std::span<const std::int8_t> entry) {
    if (entry.size() != entry_size()) {
        throw ContractError("SamplePool: entry of size " + std::to_string(entry.size()) + ", expected " +
                            std::to_string(entry_size()));
    }
    for (auto s : entry) {
        if (s != 1 && s != -1) throw ContractError("SamplePool: spins must be +-1");
    }
    spins_.insert(spins_.end(), entry.begin(), entry.end());
}

SpinProblem SpinProblem::from_model(const ClampedModel& model, SpinConvention convention) {
    const std::size_t n = model.hidden_count();
    const auto biases = model.biases();
    const auto couplings = model.couplings();
    // h = (s + 1) / 2 turns -b h - J h h' into -(b/2 + J/4 + J/4) s ... - (J/4) s s' + const.
    const double field_scale = convention == SpinConvention::binary ? 0.5 : 1.0;
    const double coupling_scale = convention == SpinConvention::binary ? 0.25 : 1.0;

    SpinProblem p;
    p.fields.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.fields[i] = field_scale * biases[i];
    std::vector<std::size_t> degree(n, 0);
    for (const auto& c : couplings) {
        ++degree[c.first];
        ++degree[c.second];
        if (convention == SpinConvention::binary) {
            p.fields[c.first] += 0.25 * c.weight;
            p.fields[c.second] += 0.25 * c.weight;
        }
    }
    p.offsets.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) p.offsets[i + 1] = p.offsets[i] + degree[i];
    p.neighbors.resize(p.offsets[n]);
    p.weights.resize(p.offsets[n]);
    std::vector<std::size_t> cursor(p.offsets.begin(), p.offsets.end() - 1);
    for (const auto& c : couplings) {
        const double w = coupling_scale * c.weight;
        p.neighbors[cursor[c.first]] = c.second;
        p.weights[cursor[c.first]++] = w;
        p.neighbors[cursor[c.second]] = c.first;
        p.weights[cursor[c.second]++] = w;
    }
    return p;
}

namespace {

void randomize(std::span<std::int8_t> spins, Rng& rng) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < spins.size(); ++i) {
        if (i % 64 == 0) bits = rng();
        spins[i] = (bits & 1U) ? 1 : -1;
        bits >>= 1;
    }
}

// Above this exponent exp(-x) is below the 2^-53 resolution of uniform01, so
// the move is rejected without drawing.
constexpr double kRejectExponent = 40.0;

inline bool metropolis_accept(double delta, double beta, Rng& rng) {
    if (delta <= 0.0) return true;
    const double x = beta * delta;
    return x < kRejectExponent && uniform01(rng) < std::exp(-x);
}

void sa_sweep(const SpinProblem& p, std::span<std::int8_t> s, double beta, Rng& rng) {
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        double local = p.fields[i];
        for (std::size_t e = p.offsets[i]; e < p.offsets[i + 1]; ++e) local += p.weights[e] * s[p.neighbors[e]];
        if (metropolis_accept(2.0 * s[i] * local, beta, rng)) s[i] = static_cast<std::int8_t>(-s[i]);
    }
}

// One sweep over every (replica, site) of the Trotter lattice. Intra-replica
// terms carry 1/r; the replica chain uses the ring neighbours, which for
// r = 2 are the same replica twice (the doubled bond) and for r = 1 is a
// constant that never changes the energy.
void sqa_sweep(const SpinProblem& p, std::span<std::int8_t> s, std::size_t r, double w_plus, double beta,
               Rng& rng) {
    const std::size_t n = p.size();
    const double inv_r = 1.0 / static_cast<double>(r);
    for (std::size_t k = 0; k < r; ++k) {
        std::int8_t* row = s.data() + k * n;
        const std::int8_t* prev = s.data() + ((k + r - 1) % r) * n;
        const std::int8_t* next = s.data() + ((k + 1) % r) * n;
        for (std::size_t i = 0; i < n; ++i) {
            double local = p.fields[i];
            for (std::size_t e = p.offsets[i]; e < p.offsets[i + 1]; ++e) local += p.weights[e] * row[p.neighbors[e]];
            local *= inv_r;
            if (r > 1) local += w_plus * (prev[i] + next[i]);
            if (metropolis_accept(2.0 * row[i] * local, beta, rng)) row[i] = static_cast<std::int8_t>(-row[i]);
        }
    }
    // World-line moves: flip site i in every replica at once. Replica bonds
    // are unchanged, so only the intra-replica terms enter. Without these the
    // lattice decorrelates along the Trotter axis only by domain-wall
    // diffusion, which takes O(r^2) sweeps.
    if (r < 2) return;
    for (std::size_t i = 0; i < n; ++i) {
        double delta = 0.0;
        for (std::size_t k = 0; k < r; ++k) {
            const std::int8_t* row = s.data() + k * n;
            double local = p.fields[i];
            for (std::size_t e = p.offsets[i]; e < p.offsets[i + 1]; ++e) local += p.weights[e] * row[p.neighbors[e]];
            delta += 2.0 * row[i] * local;
        }
        if (metropolis_accept(delta * inv_r, beta, rng)) {
            for (std::size_t k = 0; k < r; ++k) s[k * n + i] = static_cast<std::int8_t>(-s[k * n + i]);
        }
    }
}

}  // namespace

SamplePool sa_sample(const ClampedModel& model, const AnnealSchedule& schedule, std::size_t reads, Rng& rng,
                     SpinConvention target) {
    schedule.validate();
    if (!(schedule.final_value > 0.0)) throw ContractError("sa_sample: final beta must be > 0");
    const SpinProblem problem = SpinProblem::from_model(model, target);
    const std::size_t n = problem.size();
    const std::uint64_t base = rng();

    std::vector<double> betas(schedule.sweeps);
    for (std::size_t t = 0; t < schedule.sweeps; ++t) betas[t] = schedule.value_at(t);

    SamplePool pool(PoolSource::sa, n, 1);
    pool.reserve(reads);
    std::vector<std::int8_t> spins(n);
    for (std::size_t c = 0; c < reads; ++c) {
        Rng chain(mix_seed(base, c));
        randomize(spins, chain);
        for (double beta : betas) sa_sweep(problem, spins, beta, chain);
        pool.add(spins);
    }
    return pool;
}

SamplePool sqa_sample(const ClampedModel& model, const TfimParameters& params, const AnnealSchedule& schedule,
                      std::size_t reads, Rng& rng) {
    params.validate();
    schedule.validate();
    if (params.gamma == 0.0) throw ContractError("sqa_sample: target gamma is 0, use sa_sample");
    if (schedule.final_value != params.gamma) {
        throw ContractError("sqa_sample: schedule must end at the target gamma");
    }
    const SpinProblem problem = SpinProblem::from_model(model, SpinConvention::spin);
    const std::size_t n = problem.size();
    const std::size_t r = params.replicas;
    const std::uint64_t base = rng();

    std::vector<double> w_plus(schedule.sweeps);
    for (std::size_t t = 0; t < schedule.sweeps; ++t) {
        const double gamma = schedule.value_at(t);
        if (!(gamma > 0.0)) throw ContractError("sqa_sample: transverse field must stay positive");
        w_plus[t] = replica_coupling({gamma, params.beta, r});
    }

    SamplePool pool(PoolSource::sqa, n, r);
    pool.reserve(reads);
    std::vector<std::int8_t> spins(n * r);
    for (std::size_t c = 0; c < reads; ++c) {
        Rng chain(mix_seed(base, c));
        randomize(spins, chain);
        for (double wp : w_plus) sqa_sweep(problem, spins, r, wp, params.beta, chain);
        pool.add(spins);
    }
    return pool;
}

SamplePool parse_pool(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::int8_t> values;
    SamplePool pool;
    bool have_width = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) throw ParseError("empty line", lineno);
        values.clear();
        std::string_view rest(line);
        while (true) {
            const auto space = rest.find(' ');
            const auto token = rest.substr(0, space);
            if (token == "1" || token == "+1") {
                values.push_back(1);
            } else if (token == "-1") {
                values.push_back(-1);
            } else {
                throw ParseError("invalid spin token '" + std::string(token) + "' (expected -1, 1 or +1)", lineno);
            }
            if (space == std::string_view::npos) break;
            rest.remove_prefix(space + 1);
        }
        if (!have_width) {
            pool = SamplePool(PoolSource::external, values.size(), 1);
            have_width = true;
        } else if (values.size() != pool.width()) {
            throw ParseError("width " + std::to_string(values.size()) + " does not match first line width " +
                                 std::to_string(pool.width()),
                             lineno);
        }
        pool.add(values);
    }
    if (!have_width) throw ParseError("empty pool file", 1);
    return pool;
}

SamplePool load_external_pool(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open pool file " + path.string(), 0);
    return parse_pool(in);
}

void write_pool(std::ostream& out, const SamplePool& pool) {
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto e = pool.entry(i);
        for (std::size_t j = 0; j < e.size(); ++j) {
            if (j) out << ' ';
            out << (e[j] > 0 ? "1" : "-1");
        }
        out << '\n';
    }
}

SamplePool stack_replicas(const SamplePool& pool, const TfimParameters& params, std::size_t count, Rng& rng) {
    params.validate();
    if (pool.empty()) throw ContractError("stack_replicas: empty pool");
    if (pool.replicas() != 1) throw ContractError("stack_replicas: pool entries must be single configurations");
    const std::size_t r = params.replicas;
    const std::size_t n = pool.width();
    SamplePool out(PoolSource::stacked, n, r);
    out.reserve(count);
    std::vector<std::int8_t> stacked(n * r);
    for (std::size_t c = 0; c < count; ++c) {
        for (std::size_t k = 0; k < r; ++k) {
            const auto src = pool.entry(uniform_index(rng, pool.size()));
            std::copy(src.begin(), src.end(), stacked.begin() + static_cast<std::ptrdiff_t>(k * n));
        }
        out.add(stacked);
    }
    return out;
}

SamplePool replica_slice(const SamplePool& pool, std::size_t k) {
    if (k >= pool.replicas()) throw ContractError("replica_slice: replica index out of range");
    SamplePool out(PoolSource::external, pool.width(), 1);
    out.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) out.add(pool.entry(i).subspan(k * pool.width(), pool.width()));
    return out;
}

}  // namespace ferl
