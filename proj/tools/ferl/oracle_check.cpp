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

#include "oracle_check.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "ferl/free_energy.hpp"
#include "ferl/gridworld.hpp"
#include "ferl/ising.hpp"
#include "ferl/random.hpp"
#include "ferl/samplers.hpp"

namespace ferl::tools {

namespace {

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

ClampedModel random_model(Rng& rng, std::size_t n, double coupling_density) {
    std::vector<double> biases(n);
    for (auto& b : biases) b = uniform(rng, -1.0, 1.0);
    std::vector<Coupling> couplings;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (uniform01(rng) < coupling_density) couplings.push_back({i, j, uniform(rng, -1.0, 1.0)});
        }
    }
    return {std::move(biases), std::move(couplings)};
}

struct Check {
    std::string name;
    std::function<double()> error;  // measured discrepancy
    double tolerance;
};

}  // namespace

bool run_oracle_checks(std::ostream& out, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Check> checks;

    checks.push_back({"rbm closed form vs enumeration (50 models, <= 8 hidden)",
                      [&] {
                          double worst = 0.0;
                          for (int i = 0; i < 50; ++i) {
                              const auto m = random_model(rng, 1 + uniform_index(rng, 8), 0.0);
                              const double beta = uniform(rng, 0.2, 4.0);
                              worst = std::max(worst, std::abs(rbm_free_energy(m, beta) -
                                                               exact_classical_free_energy(m, beta,
                                                                                           SpinConvention::binary)));
                          }
                          return worst;
                      },
                      1e-12});

    checks.push_back({"tfim matrix at gamma = 0 is diag(spin energies)",
                      [&] {
                          const auto m = random_model(rng, 5, 0.5);
                          const auto h = tfim_matrix(m, 0.0);
                          double worst = 0.0;
                          std::vector<std::int8_t> s(5);
                          for (Eigen::Index x = 0; x < h.rows(); ++x) {
                              for (std::size_t i = 0; i < 5; ++i) s[i] = ((x >> i) & 1) ? 1 : -1;
                              worst = std::max(worst, std::abs(h(x, x) - spin_energy(m, s)));
                              for (Eigen::Index y = 0; y < h.cols(); ++y) {
                                  if (y != x) worst = std::max(worst, std::abs(h(x, y)));
                              }
                          }
                          return worst;
                      },
                      1e-12});

    checks.push_back({"one-qubit quantum free energy vs -(1/beta) ln 2cosh(beta sqrt(b^2 + gamma^2))",
                      [&] {
                          double worst = 0.0;
                          for (int i = 0; i < 20; ++i) {
                              const double b = uniform(rng, -2.0, 2.0);
                              const TfimParameters p{uniform(rng, 0.1, 2.0), uniform(rng, 0.2, 4.0), 1};
                              const double exact =
                                  -std::log(2.0 * std::cosh(p.beta * std::hypot(b, p.gamma))) / p.beta;
                              worst = std::max(worst, std::abs(exact_quantum_free_energy({{b}, {}}, p) - exact));
                          }
                          return worst;
                      },
                      1e-10});

    checks.push_back({"value iteration Bellman residual on the 3x5 grid world",
                      [&] {
                          const auto env = GridWorld::canonical();
                          const auto vi = value_iteration(env);
                          double worst = 0.0;
                          for (std::size_t s = 0; s < env.state_count(); ++s) {
                              for (std::size_t a = 0; a < kActionCount; ++a) {
                                  const auto step = env.step(s, kActions[a]);
                                  const auto& next = vi.q[step.next_state];
                                  const double target =
                                      step.reward + env.discount() * *std::max_element(next.begin(), next.end());
                                  worst = std::max(worst, std::abs(vi.q[s][a] - target));
                              }
                          }
                          return worst;
                      },
                      1e-8});

    checks.push_back({"SA total variation on a 4-spin model (1e4 reads)",
                      [&] {
                          const auto m = random_model(rng, 4, 1.0);
                          const double beta = 2.0;
                          const auto exact = exact_boltzmann_distribution(m, beta);
                          const auto pool = sa_sample(m, {200, 0.1, beta}, 10000, rng);
                          std::vector<double> freq(exact.size(), 0.0);
                          for (std::size_t i = 0; i < pool.size(); ++i) {
                              std::size_t x = 0;
                              const auto e = pool.entry(i);
                              for (std::size_t k = 0; k < e.size(); ++k) x |= (e[k] > 0 ? 1U : 0U) << k;
                              freq[x] += 1.0 / static_cast<double>(pool.size());
                          }
                          double tv = 0.0;
                          for (std::size_t x = 0; x < exact.size(); ++x) tv += 0.5 * std::abs(freq[x] - exact[x]);
                          return tv;
                      },
                      0.05});

    checks.push_back({"SQA one-qubit <s^z> vs exact Gibbs state",
                      [&] {
                          const ClampedModel m({0.4}, {});
                          const TfimParameters p{0.5, 2.0, 16};
                          const auto pool = sqa_sample(m, p, {200, 4.0, p.gamma}, 2000, rng);
                          return std::abs(estimate_observables(pool, m).sigma_z[0] -
                                          exact_gibbs_observables(m, p).sigma_z[0]);
                      },
                      0.05});

    bool all = true;
    for (const auto& c : checks) {
        const double err = c.error();
        const bool ok = err <= c.tolerance;
        all = all && ok;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3g (tol %.3g)", err, c.tolerance);
        out << (ok ? "ok    " : "FAIL  ") << c.name << ": " << buf << "\n";
    }
    return all;
}

}  // namespace ferl::tools
