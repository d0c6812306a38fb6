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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "ferl/ising.hpp"
#include "ferl/random.hpp"

namespace ferl {

enum class ScheduleKind : std::uint8_t { linear };

/// Per-sweep control parameter (beta for SA, gamma for SQA).
struct AnnealSchedule {
    std::size_t sweeps = 1000;
    double initial_value = 0.1;
    double final_value = 2.0;
    ScheduleKind kind = ScheduleKind::linear;

    void validate() const;
    /// Value used during sweep t (0-based); the last sweep uses final_value.
    double value_at(std::size_t sweep) const;
};

enum class PoolSource : std::uint8_t { sa, sqa, external, stacked };

/// Multiset of +-1 configurations. Every entry is `replicas` x `width` spins
/// (replicas == 1 for plain reads, r for Suzuki-Trotter configurations).
class SamplePool {
   public:
    SamplePool() = default;
    SamplePool(PoolSource source, std::size_t width, std::size_t replicas = 1);

    PoolSource source() const noexcept { return source_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t replicas() const noexcept { return replicas_; }
    std::size_t entry_size() const noexcept { return width_ * replicas_; }
    std::size_t size() const noexcept { return entry_size() == 0 ? 0 : spins_.size() / entry_size(); }
    bool empty() const noexcept { return spins_.empty(); }

    std::span<const std::int8_t> entry(std::size_t i) const {
        return {spins_.data() + i * entry_size(), entry_size()};
    }
    EffectiveConfiguration effective(std::size_t i) const;
    std::span<const std::int8_t> spins() const noexcept { return spins_; }

    /// Appends one entry; throws unless it has entry_size() values in {-1, +1}.
    void add(std::span<const std::int8_t> entry);
    void reserve(std::size_t entries) { spins_.reserve(entries * entry_size()); }

    friend bool operator==(const SamplePool&, const SamplePool&) = default;

   private:
    PoolSource source_ = PoolSource::external;
    std::size_t width_ = 0;
    std::size_t replicas_ = 1;
    std::vector<std::int8_t> spins_;
};

/// Which Boltzmann distribution a classical sampler targets.
///   spin:   p(s) ~ exp(-beta * spin_energy(s))
///   binary: p(s) ~ exp(-beta * classical_energy((s + 1) / 2))
/// Output spins are +-1 either way.
enum class SpinConvention : std::uint8_t { spin, binary };

/// Sparse +-1 Ising problem E(s) = -sum f_i s_i - sum J_ij s_i s_j, the
/// form every Metropolis kernel here works on.
struct SpinProblem {
    std::vector<double> fields;
    std::vector<std::size_t> offsets;    // CSR row starts, size n + 1
    std::vector<std::size_t> neighbors;  // both directions of every coupling
    std::vector<double> weights;

    std::size_t size() const noexcept { return fields.size(); }
    static SpinProblem from_model(const ClampedModel& model, SpinConvention convention);
};

/// Simulated annealing: `reads` independent chains, each from a uniformly
/// random start through schedule.sweeps sequential Metropolis sweeps with
/// beta following the schedule. Returns each chain's final state.
SamplePool sa_sample(const ClampedModel& model, const AnnealSchedule& schedule, std::size_t reads, Rng& rng,
                     SpinConvention target = SpinConvention::spin);

/// Simulated quantum annealing on the r-replica Suzuki-Trotter model:
/// fixed beta = params.beta, gamma lowered per the schedule down to
/// params.gamma, replica coupling recomputed every sweep.
SamplePool sqa_sample(const ClampedModel& model, const TfimParameters& params, const AnnealSchedule& schedule,
                      std::size_t reads, Rng& rng);

/// Read-pool text format: one configuration per line, tokens -1/1/+1
/// separated by single spaces, no header. Width comes from the first line.
SamplePool parse_pool(std::istream& in);
SamplePool load_external_pool(const std::filesystem::path& path);
/// Writes one line per entry (all replicas of an entry flattened).
void write_pool(std::ostream& out, const SamplePool& pool);

/// Builds `count` r-replica configurations; each replica is an independent
/// uniform draw (with replacement) from a single-replica pool.
SamplePool stack_replicas(const SamplePool& pool, const TfimParameters& params, std::size_t count, Rng& rng);

/// Single-replica pool holding replica `k` of every entry.
SamplePool replica_slice(const SamplePool& pool, std::size_t k);

}  // namespace ferl
