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

#include "ferl/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <string>

#include "ferl/errors.hpp"

namespace ferl {

std::string_view to_string(Action a) {
    switch (a) {
        case Action::up: return "up";
        case Action::down: return "down";
        case Action::left: return "left";
        case Action::right: return "right";
        case Action::stay: return "stay";
    }
    return "?";
}

GridWorld::GridWorld(std::size_t rows, std::size_t cols, std::vector<CellKind> cells, CellValues values,
                     double discount)
    : rows_(rows), cols_(cols), cells_(std::move(cells)), values_(values), discount_(discount) {
    if (rows_ == 0 || cols_ == 0 || cells_.size() != rows_ * cols_) {
        throw ContractError("GridWorld: cell count does not match rows x cols");
    }
    if (!(discount_ >= 0.0 && discount_ < 1.0)) throw ContractError("GridWorld: discount must be in [0, 1)");
    state_of_cell_.assign(cells_.size(), std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i] == CellKind::wall) continue;
        state_of_cell_[i] = cells_of_state_.size();
        cells_of_state_.push_back({static_cast<int>(i / cols_), static_cast<int>(i % cols_)});
    }
    if (cells_of_state_.empty()) throw ContractError("GridWorld: no free cells");
}

GridWorld GridWorld::canonical() {
    std::vector<CellKind> cells(15, CellKind::empty);
    cells[0] = CellKind::reward;
    cells[1 * 5 + 2] = CellKind::wall;
    cells[2 * 5 + 2] = CellKind::penalty;
    return {3, 5, std::move(cells)};
}

GridWorld GridWorld::parse(std::istream& in, CellValues values, double discount) {
    std::vector<CellKind> cells;
    std::size_t cols = 0, rows = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (cols == 0) cols = line.size();
        if (line.size() != cols) throw ParseError("ragged grid row", lineno);
        for (char ch : line) {
            switch (ch) {
                case 'R': cells.push_back(CellKind::reward); break;
                case 'W': cells.push_back(CellKind::wall); break;
                case 'P': cells.push_back(CellKind::penalty); break;
                case '.': cells.push_back(CellKind::empty); break;
                default: throw ParseError(std::string("unknown map character '") + ch + "'", lineno);
            }
        }
        ++rows;
    }
    if (rows == 0) throw ParseError("empty grid map", lineno + 1);
    return {rows, cols, std::move(cells), values, discount};
}

GridWorld GridWorld::load(const std::filesystem::path& path, CellValues values, double discount) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open grid map " + path.string(), 0);
    return parse(in, values, discount);
}

CellKind GridWorld::kind(Cell c) const {
    if (c.row < 0 || c.col < 0 || static_cast<std::size_t>(c.row) >= rows_ || static_cast<std::size_t>(c.col) >= cols_) {
        throw ContractError("cell outside the grid");
    }
    return cells_[static_cast<std::size_t>(c.row) * cols_ + static_cast<std::size_t>(c.col)];
}

Cell GridWorld::cell_of(std::size_t state) const {
    if (state >= cells_of_state_.size()) throw ContractError("invalid state " + std::to_string(state));
    return cells_of_state_[state];
}

std::size_t GridWorld::state_of(Cell c) const {
    if (kind(c) == CellKind::wall) throw ContractError("wall cell is not a state");
    return state_of_cell_[static_cast<std::size_t>(c.row) * cols_ + static_cast<std::size_t>(c.col)];
}

double GridWorld::cell_value(Cell c) const {
    switch (kind(c)) {
        case CellKind::reward: return values_.reward;
        case CellKind::penalty: return values_.penalty;
        default: return values_.neutral;
    }
}

StepResult GridWorld::step(std::size_t state, Action action) const {
    const Cell from = cell_of(state);
    Cell to = from;
    switch (action) {
        case Action::up: --to.row; break;
        case Action::down: ++to.row; break;
        case Action::left: --to.col; break;
        case Action::right: ++to.col; break;
        case Action::stay: break;
    }
    const bool inside = to.row >= 0 && to.col >= 0 && static_cast<std::size_t>(to.row) < rows_ &&
                        static_cast<std::size_t>(to.col) < cols_;
    if (!inside || kind(to) == CellKind::wall) to = from;
    return {state_of(to), cell_value(to)};
}

GridWorld GridWorld::with_discount(double discount) const {
    return {rows_, cols_, cells_, values_, discount};
}

std::vector<std::uint8_t> encode_state(const GridWorld& env, std::size_t state) {
    if (state >= env.state_count()) throw ContractError("encode_state: invalid state");
    std::vector<std::uint8_t> out(env.state_count(), 0);
    out[state] = 1;
    return out;
}

std::vector<std::uint8_t> encode_action(Action action) {
    std::vector<std::uint8_t> out(kActionCount, 0);
    out[static_cast<std::size_t>(action)] = 1;
    return out;
}

std::size_t decode_one_hot(std::span<const std::uint8_t> encoding) {
    std::size_t pos = encoding.size();
    for (std::size_t i = 0; i < encoding.size(); ++i) {
        if (encoding[i] == 0) continue;
        if (encoding[i] != 1 || pos != encoding.size()) throw ContractError("decode_one_hot: not one-hot");
        pos = i;
    }
    if (pos == encoding.size()) throw ContractError("decode_one_hot: not one-hot");
    return pos;
}

ValueIterationResult value_iteration(const GridWorld& env, double tolerance) {
    if (!(tolerance > 0.0)) throw ContractError("value_iteration: tolerance must be > 0");
    const std::size_t n = env.state_count();
    std::vector<std::array<StepResult, kActionCount>> transitions(n);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < kActionCount; ++a) transitions[s][a] = env.step(s, kActions[a]);
    }
    ValueIterationResult out;
    out.q.assign(n, {});
    std::vector<double> v(n, 0.0);
    while (true) {
        ++out.iterations;
        double change = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t a = 0; a < kActionCount; ++a) {
                const auto& t = transitions[s][a];
                const double updated = t.reward + env.discount() * v[t.next_state];
                change = std::max(change, std::abs(updated - out.q[s][a]));
                out.q[s][a] = updated;
            }
        }
        for (std::size_t s = 0; s < n; ++s) v[s] = *std::max_element(out.q[s].begin(), out.q[s].end());
        if (change < tolerance) break;
    }
    out.optimal.assign(n, 0);
    for (std::size_t s = 0; s < n; ++s) {
        const double best = *std::max_element(out.q[s].begin(), out.q[s].end());
        for (std::size_t a = 0; a < kActionCount; ++a) {
            if (out.q[s][a] >= best - 1e-9) out.optimal[s] |= static_cast<ActionSet>(1U << a);
        }
    }
    return out;
}

double policy_fidelity(const PolicyTable& policy, std::span<const ActionSet> optimal) {
    if (policy.size() != optimal.size()) throw ContractError("policy_fidelity: size mismatch");
    std::size_t hits = 0;
    for (std::size_t s = 0; s < policy.size(); ++s) hits += contains(optimal[s], policy[s]);
    return static_cast<double>(hits) / static_cast<double>(policy.size());
}

FidelityCurve fidelity(std::span<const TrainingHistory> histories, std::span<const ActionSet> optimal) {
    if (histories.empty()) throw ContractError("fidelity: no runs");
    const std::size_t samples = histories.front().snapshots.size();
    for (const auto& h : histories) {
        if (h.snapshots.size() != samples) throw ContractError("fidelity: runs have different sample counts");
    }
    const double runs = static_cast<double>(histories.size());
    FidelityCurve out;
    out.mean.resize(samples);
    out.stderr_of_mean.resize(samples);
    std::vector<double> per_run(histories.size());
    for (std::size_t i = 0; i < samples; ++i) {
        double sum = 0.0;
        for (std::size_t l = 0; l < histories.size(); ++l) {
            per_run[l] = policy_fidelity(histories[l].snapshots[i], optimal);
            sum += per_run[l];
        }
        const double mean = sum / runs;
        double var = 0.0;
        for (double f : per_run) var += (f - mean) * (f - mean);
        out.mean[i] = mean;
        out.stderr_of_mean[i] = histories.size() > 1 ? std::sqrt(var / (runs - 1.0) / runs) : 0.0;
    }
    return out;
}

}  // namespace ferl
