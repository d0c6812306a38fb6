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
#include <random>

namespace ferl {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer over (seed, stream). Used to derive independent
/// child seeds: run seeds from a master seed, chain seeds from a sampler call.
/// Child k never depends on how many other children were derived.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Uniform double in [0, 1) with 53 random bits. Platform independent,
/// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) noexcept { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform index in [0, n). Lemire's multiply-shift with rejection, so the
/// sequence is identical on every standard library.
std::size_t uniform_index(Rng& rng, std::size_t n);

}  // namespace ferl
