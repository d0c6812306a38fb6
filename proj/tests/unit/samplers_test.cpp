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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "ferl/errors.hpp"
#include "ferl/free_energy.hpp"

namespace ferl {
namespace {

std::size_t index_of(std::span<const std::int8_t> spins) {
    std::size_t x = 0;
    for (std::size_t i = 0; i < spins.size(); ++i) x |= static_cast<std::size_t>(spins[i] > 0) << i;
    return x;
}

double total_variation(const SamplePool& pool, const std::vector<double>& exact) {
    std::vector<double> freq(exact.size(), 0.0);
    for (std::size_t i = 0; i < pool.size(); ++i) freq[index_of(pool.entry(i))] += 1.0;
    double tv = 0.0;
    for (std::size_t x = 0; x < exact.size(); ++x) tv += 0.5 * std::abs(freq[x] / pool.size() - exact[x]);
    return tv;
}

}  // namespace

TEST(schedule, linear_values) {
    const AnnealSchedule s{5, 0.0, 2.0};
    EXPECT_DOUBLE_EQ(s.value_at(0), 0.0);
    EXPECT_DOUBLE_EQ(s.value_at(2), 1.0);
    EXPECT_DOUBLE_EQ(s.value_at(4), 2.0);
    const AnnealSchedule one{1, 0.1, 2.0};
    EXPECT_DOUBLE_EQ(one.value_at(0), 2.0);
    EXPECT_THROW((AnnealSchedule{0, 0.1, 2.0}.validate()), ContractError);
}

TEST(sa, strong_bias_is_almost_always_up) {
    // Exact marginal 1 / (1 + exp(-2 beta b)) = 1 - 2e-9 for b = 5, beta = 2.
    const ClampedModel m({5.0}, {});
    Rng rng(1);
    const auto pool = sa_sample(m, {100, 0.1, 2.0}, 1000, rng);
    std::size_t up = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) up += pool.entry(i)[0] > 0;
    EXPECT_GE(up, 990U);
}

TEST(sa, zero_model_is_unbiased) {
    const ClampedModel m({0.0, 0.0, 0.0}, {});
    Rng rng(2);
    const auto pool = sa_sample(m, {50, 0.1, 2.0}, 4000, rng);
    const auto obs = estimate_observables(pool, m);
    // 3 sigma of the mean of 4000 fair +-1 draws.
    for (double z : obs.sigma_z) EXPECT_LT(std::abs(z), 3.0 / std::sqrt(4000.0));
}

TEST(sa, matches_boltzmann_on_small_model) {
    const ClampedModel m({0.4, -0.2, 0.1}, {{0, 1, 0.5}, {1, 2, -0.3}});
    Rng rng(3);
    const auto pool = sa_sample(m, {300, 0.1, 1.0}, 20000, rng);
    EXPECT_LT(total_variation(pool, exact_boltzmann_distribution(m, 1.0)), 0.02);
}

TEST(sa, binary_target_matches_gbm_distribution) {
    const ClampedModel m({0.4, -0.9, 0.3}, {{0, 1, 1.2}, {0, 2, -0.6}});
    Rng rng(4);
    const auto pool = sa_sample(m, {300, 0.1, 2.0}, 20000, rng, SpinConvention::binary);
    EXPECT_LT(total_variation(pool, exact_boltzmann_distribution(m, 2.0, SpinConvention::binary)), 0.02);
}

TEST(sa, deterministic_given_seed) {
    const ClampedModel m({0.4, -0.2}, {{0, 1, 0.5}});
    Rng a(9);
    Rng b(9);
    const auto pa = sa_sample(m, {20, 0.1, 2.0}, 50, a);
    const auto pb = sa_sample(m, {20, 0.1, 2.0}, 50, b);
    ASSERT_EQ(pa.size(), pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        EXPECT_TRUE(std::equal(pa.entry(i).begin(), pa.entry(i).end(), pb.entry(i).begin()));
    }
}

TEST(sqa, one_qubit_magnetization_matches_gibbs_state) {
    for (const TfimParameters p : {TfimParameters{0.5, 2.0, 10}, TfimParameters{1.0, 1.0, 10}}) {
        const ClampedModel m({0.3}, {});
        Rng rng(5);
        const auto pool = sqa_sample(m, p, {100, 4.0, p.gamma}, 4000, rng);
        EXPECT_EQ(pool.replicas(), p.replicas);
        EXPECT_NEAR(estimate_observables(pool, m).sigma_z[0], exact_gibbs_observables(m, p).sigma_z[0], 0.05);
    }
}

TEST(sqa, two_qubit_correlations_at_fixed_field) {
    const ClampedModel m({0.3, -0.2}, {{0, 1, 0.4}});
    const TfimParameters p{0.5, 2.0, 20};
    Rng rng(6);
    const auto pool = sqa_sample(m, p, {200, p.gamma, p.gamma}, 3000, rng);
    const auto est = estimate_observables(pool, m);
    const auto exact = exact_gibbs_observables(m, p);
    EXPECT_NEAR(est.sigma_zz[0], exact.sigma_zz[0], 0.05);
    EXPECT_NEAR(est.sigma_z[0], exact.sigma_z[0], 0.05);
    EXPECT_NEAR(est.sigma_z[1], exact.sigma_z[1], 0.05);
}

TEST(sqa, contract_violations) {
    const ClampedModel m({0.3}, {});
    Rng rng(1);
    EXPECT_THROW(sqa_sample(m, {0.0, 2.0, 4}, {10, 1.0, 0.0}, 5, rng), ContractError);
    EXPECT_THROW(sqa_sample(m, {0.5, 2.0, 4}, {10, 1.0, 0.4}, 5, rng), ContractError);
}

TEST(sqa, single_replica_runs) {
    const ClampedModel m({0.3}, {});
    Rng rng(1);
    const auto pool = sqa_sample(m, {0.5, 2.0, 1}, {10, 4.0, 0.5}, 10, rng);
    EXPECT_EQ(pool.size(), 10U);
}

TEST(pool, parse_accepts_all_spin_tokens) {
    std::istringstream in("1 -1 +1\n-1 -1 1\n");
    const auto pool = parse_pool(in);
    ASSERT_EQ(pool.size(), 2U);
    EXPECT_EQ(pool.width(), 3U);
    EXPECT_EQ(pool.entry(0)[2], 1);
    EXPECT_EQ(pool.source(), PoolSource::external);
}

TEST(pool, parse_errors_report_line) {
    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream in(text);
        try {
            parse_pool(in);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("1 -1\n1 0\n"), 2U);
    EXPECT_EQ(line_of("1 -1\n1 -1 1\n"), 2U);
    EXPECT_EQ(line_of("1 -1\n\n1 1\n"), 2U);
    EXPECT_EQ(line_of("1  -1\n"), 1U);
    EXPECT_EQ(line_of("x\n"), 1U);
}

TEST(pool, write_parse_round_trip) {
    SamplePool pool(PoolSource::sa, 4, 1);
    pool.add(std::vector<std::int8_t>{1, -1, -1, 1});
    pool.add(std::vector<std::int8_t>{-1, -1, 1, 1});
    std::stringstream io;
    write_pool(io, pool);
    const auto back = parse_pool(io);
    ASSERT_EQ(back.size(), 2U);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_TRUE(std::equal(back.entry(i).begin(), back.entry(i).end(), pool.entry(i).begin()));
    }
}

TEST(pool, rejects_non_spin_values) {
    SamplePool pool(PoolSource::sa, 2, 1);
    EXPECT_THROW(pool.add(std::vector<std::int8_t>{1, 0}), ContractError);
    EXPECT_THROW(pool.add(std::vector<std::int8_t>{1}), ContractError);
}

TEST(stacking, builds_requested_shape_from_pool_members) {
    SamplePool reads(PoolSource::external, 2, 1);
    reads.add(std::vector<std::int8_t>{1, 1});
    reads.add(std::vector<std::int8_t>{-1, 1});
    Rng rng(3);
    const auto stacked = stack_replicas(reads, {0.5, 2.0, 6}, 150, rng);
    EXPECT_EQ(stacked.size(), 150U);
    EXPECT_EQ(stacked.replicas(), 6U);
    EXPECT_EQ(stacked.source(), PoolSource::stacked);
    for (std::size_t i = 0; i < stacked.size(); ++i) {
        for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(stacked.entry(i)[2 * k + 1], 1);
    }
}

TEST(stacking, slice_extracts_one_replica) {
    SamplePool lattice(PoolSource::sqa, 2, 3);
    lattice.add(std::vector<std::int8_t>{1, 1, -1, 1, -1, -1});
    const auto slice = replica_slice(lattice, 1);
    EXPECT_EQ(slice.replicas(), 1U);
    EXPECT_EQ(slice.entry(0)[0], -1);
    EXPECT_EQ(slice.entry(0)[1], 1);
    EXPECT_THROW(replica_slice(lattice, 3), ContractError);
}

}  // namespace ferl
