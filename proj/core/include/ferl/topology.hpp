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
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "ferl/ising.hpp"
#include "ferl/random.hpp"

namespace ferl {

enum class TopologyKind : std::uint8_t { chimera, dbm, rbm, custom };

std::string_view to_string(TopologyKind kind);

/// Which bipartite side of the two Chimera cells receives the state nodes
/// ("blue"); the action nodes attach to the other side ("red").
enum class ChimeraColoring : std::uint8_t { states_on_vertical, states_on_horizontal };

/// Trainable Boltzmann-machine graph: visible (state + action) nodes, hidden
/// nodes, and weights on a fixed set of edges. Visible index v runs over
/// states first, then actions. There are never visible-visible edges.
class NetworkTopology {
   public:
    NetworkTopology() = default;
    /// `adjacency` is visible_count x hidden_count row-major (non-zero = edge).
    NetworkTopology(TopologyKind kind, std::size_t state_count, std::size_t action_count,
                    std::size_t hidden_count, std::vector<std::uint8_t> adjacency,
                    std::vector<Coupling> hidden_edges);

    TopologyKind kind() const noexcept { return kind_; }
    std::size_t state_count() const noexcept { return state_count_; }
    std::size_t action_count() const noexcept { return action_count_; }
    std::size_t visible_count() const noexcept { return state_count_ + action_count_; }
    std::size_t hidden_count() const noexcept { return hidden_count_; }

    NodeId state_node(std::size_t s) const;
    NodeId action_node(std::size_t a) const;
    NodeId hidden_node(std::size_t h) const;

    bool connected(std::size_t visible, std::size_t hidden) const;
    double visible_hidden(std::size_t visible, std::size_t hidden) const;
    /// Throws ContractError when (visible, hidden) is not an edge.
    void set_visible_hidden(std::size_t visible, std::size_t hidden, double weight);
    /// Row of visible->hidden weights; zero where there is no edge.
    std::span<const double> visible_row(std::size_t visible) const;

    std::span<const Coupling> hidden_edges() const noexcept { return hidden_edges_; }
    void set_hidden_weight(std::size_t edge, double weight);

    std::size_t visible_hidden_edge_count() const;
    std::size_t hidden_hidden_edge_count() const noexcept { return hidden_edges_.size(); }

    friend bool operator==(const NetworkTopology&, const NetworkTopology&) = default;

   private:
    TopologyKind kind_ = TopologyKind::custom;
    std::size_t state_count_ = 0;
    std::size_t action_count_ = 0;
    std::size_t hidden_count_ = 0;
    std::vector<std::uint8_t> adjacency_;
    std::vector<double> weights_;
    std::vector<Coupling> hidden_edges_;
};

/// Two adjacent 16-qubit Chimera unit cells. Qubits 8c..8c+3 form the
/// vertical side of cell c and 8c+4..8c+7 the horizontal side; each cell is
/// K4,4 and the horizontal qubits couple to their counterpart in the other cell.
NetworkTopology build_chimera_two_cell(std::size_t state_count = 14, std::size_t action_count = 5,
                                       ChimeraColoring coloring = ChimeraColoring::states_on_vertical);

/// Layered bipartite network: states -> layer 0 -> ... -> last layer -> actions.
NetworkTopology build_dbm(std::size_t state_count = 14, std::size_t action_count = 5,
                          std::span<const std::size_t> layer_sizes = {});

/// One hidden layer fully connected to every visible node, no hidden-hidden edges.
NetworkTopology build_rbm(std::size_t state_count = 14, std::size_t action_count = 5,
                          std::size_t hidden_count = 16);

/// Copy of `topology` with visible-hidden weights drawn uniformly in
/// [-scale, scale] and hidden-hidden weights in [-hidden_scale, hidden_scale].
NetworkTopology init_weights(const NetworkTopology& topology, Rng& rng, double scale, double hidden_scale);
inline NetworkTopology init_weights(const NetworkTopology& topology, Rng& rng, double scale) {
    return init_weights(topology, rng, scale, scale);
}

/// bias_h = sum_v w_vh * value_v for arbitrary real visible values (linear).
std::vector<double> fold_visible(const NetworkTopology& topology, std::span<const double> visible_values);

/// Clamp one-hot state and action encodings; throws on anything else.
ClampedModel clamp(const NetworkTopology& topology, std::span<const std::uint8_t> state_encoding,
                   std::span<const std::uint8_t> action_encoding);
/// Same as above for one-hot positions.
ClampedModel clamp(const NetworkTopology& topology, std::size_t state, std::size_t action);

/// Line-oriented checkpoint:
///   ferl-topology 1
///   kind <chimera|dbm|rbm|custom>
///   nodes <states> <actions> <hidden>
///   edge <u> <v> <weight>       (one per edge)
/// Global node ids: states 0..S-1, actions S..S+A-1, hidden S+A.. .
void save_topology(std::ostream& out, const NetworkTopology& topology);
NetworkTopology load_topology(std::istream& in);

}  // namespace ferl
