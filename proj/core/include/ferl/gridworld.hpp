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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace ferl {

enum class Action : std::uint8_t { up, down, left, right, stay };
inline constexpr std::size_t kActionCount = 5;
inline constexpr std::array<Action, kActionCount> kActions{Action::up, Action::down, Action::left, Action::right,
                                                           Action::stay};

std::string_view to_string(Action a);

enum class CellKind : std::uint8_t { empty, reward, wall, penalty };

struct Cell {
    int row = 0;
    int col = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

struct StepResult {
    std::size_t next_state = 0;
    double reward = 0.0;
};

/// Bit i set <=> action i is in the set.
using ActionSet = std::uint8_t;

inline bool contains(ActionSet set, std::size_t action) { return (set >> action) & 1U; }

struct CellValues {
    double reward = 200.0;
    double neutral = 100.0;
    double penalty = 0.0;
};

/// Deterministic continuing grid world. States are the non-wall cells in
/// row-major order. Moving off the grid or into a wall leaves the agent in
/// place; the reward is the value of the cell occupied after the move.
class GridWorld {
   public:
    GridWorld(std::size_t rows, std::size_t cols, std::vector<CellKind> cells, CellValues values = {},
              double discount = 0.8);

    /// 3 x 5 instance: reward at (0,0), wall at (1,2), penalty at (2,2).
    static GridWorld canonical();
    /// Map text: one row per line using R, W, P and '.'.
    static GridWorld parse(std::istream& in, CellValues values = {}, double discount = 0.8);
    static GridWorld load(const std::filesystem::path& path, CellValues values = {}, double discount = 0.8);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t state_count() const noexcept { return cells_of_state_.size(); }
    double discount() const noexcept { return discount_; }
    const CellValues& values() const noexcept { return values_; }

    CellKind kind(Cell c) const;
    Cell cell_of(std::size_t state) const;
    /// Throws ContractError for walls and out-of-grid cells.
    std::size_t state_of(Cell c) const;

    StepResult step(std::size_t state, Action action) const;

    GridWorld with_discount(double discount) const;

   private:
    double cell_value(Cell c) const;

    std::size_t rows_;
    std::size_t cols_;
    std::vector<CellKind> cells_;
    CellValues values_;
    double discount_;
    std::vector<Cell> cells_of_state_;
    std::vector<std::size_t> state_of_cell_;
};

std::vector<std::uint8_t> encode_state(const GridWorld& env, std::size_t state);
std::vector<std::uint8_t> encode_action(Action action);
std::size_t decode_one_hot(std::span<const std::uint8_t> encoding);

struct ValueIterationResult {
    std::vector<std::array<double, kActionCount>> q;
    std::vector<ActionSet> optimal;
    std::size_t iterations = 0;
};

/// Iterates Q <- r + discount * max Q(s', .) from zero until the sup-norm
/// change drops below `tolerance`. Optimal sets use a 1e-9 tie tolerance.
ValueIterationResult value_iteration(const GridWorld& env, double tolerance = 1e-10);

/// Greedy action per state.
using PolicyTable = std::vector<std::uint8_t>;

/// A training run as seen by the fidelity metric.
struct TrainingHistory {
    std::vector<PolicyTable> snapshots;  // one per training sample
    std::vector<double> td_errors;
};

struct FidelityCurve {
    std::vector<double> mean;
    std::vector<double> stderr_of_mean;  // across runs; 0 for a single run
};

/// fidelity(i) = (runs * |S|)^-1 sum_l sum_s 1{A(s, i, l) in optimal(s)}.
FidelityCurve fidelity(std::span<const TrainingHistory> histories, std::span<const ActionSet> optimal);

/// Fraction of states whose policy action lies in the optimal set.
double policy_fidelity(const PolicyTable& policy, std::span<const ActionSet> optimal);

}  // namespace ferl
