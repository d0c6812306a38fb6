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

#include "ferl/topology.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "ferl/errors.hpp"

namespace ferl {

std::string_view to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::chimera: return "chimera";
        case TopologyKind::dbm: return "dbm";
        case TopologyKind::rbm: return "rbm";
        case TopologyKind::custom: return "custom";
    }
    return "custom";
}

NetworkTopology::NetworkTopology(TopologyKind kind, std::size_t state_count, std::size_t action_count,
                                 std::size_t hidden_count, std::vector<std::uint8_t> adjacency,
                                 std::vector<Coupling> hidden_edges)
    : kind_(kind),
      state_count_(state_count),
      action_count_(action_count),
      hidden_count_(hidden_count),
      adjacency_(std::move(adjacency)),
      weights_(adjacency_.size(), 0.0),
      hidden_edges_(std::move(hidden_edges)) {
    if (adjacency_.size() != visible_count() * hidden_count_) {
        throw ContractError("NetworkTopology: adjacency is not visible x hidden");
    }
    // ClampedModel performs the range/duplicate/self-loop checks on hidden edges.
    ClampedModel check(std::vector<double>(hidden_count_, 0.0), hidden_edges_);
    hidden_edges_.assign(check.couplings().begin(), check.couplings().end());
}

NodeId NetworkTopology::state_node(std::size_t s) const {
    if (s >= state_count_) throw ContractError("state node out of range");
    return {s, NodeKind::state_visible};
}

NodeId NetworkTopology::action_node(std::size_t a) const {
    if (a >= action_count_) throw ContractError("action node out of range");
    return {state_count_ + a, NodeKind::action_visible};
}

NodeId NetworkTopology::hidden_node(std::size_t h) const {
    if (h >= hidden_count_) throw ContractError("hidden node out of range");
    return {visible_count() + h, NodeKind::hidden};
}

bool NetworkTopology::connected(std::size_t visible, std::size_t hidden) const {
    if (visible >= visible_count() || hidden >= hidden_count_) return false;
    return adjacency_[visible * hidden_count_ + hidden] != 0;
}

double NetworkTopology::visible_hidden(std::size_t visible, std::size_t hidden) const {
    if (visible >= visible_count() || hidden >= hidden_count_) throw ContractError("visible/hidden index out of range");
    return weights_[visible * hidden_count_ + hidden];
}

void NetworkTopology::set_visible_hidden(std::size_t visible, std::size_t hidden, double weight) {
    if (!connected(visible, hidden)) {
        throw ContractError("no edge between visible " + std::to_string(visible) + " and hidden " +
                            std::to_string(hidden));
    }
    if (!std::isfinite(weight)) throw ContractError("non-finite weight");
    weights_[visible * hidden_count_ + hidden] = weight;
}

std::span<const double> NetworkTopology::visible_row(std::size_t visible) const {
    if (visible >= visible_count()) throw ContractError("visible index out of range");
    return {weights_.data() + visible * hidden_count_, hidden_count_};
}

void NetworkTopology::set_hidden_weight(std::size_t edge, double weight) {
    if (edge >= hidden_edges_.size()) throw ContractError("hidden edge index out of range");
    if (!std::isfinite(weight)) throw ContractError("non-finite weight");
    hidden_edges_[edge].weight = weight;
}

std::size_t NetworkTopology::visible_hidden_edge_count() const {
    std::size_t count = 0;
    for (auto a : adjacency_) count += a != 0;
    return count;
}

NetworkTopology build_chimera_two_cell(std::size_t state_count, std::size_t action_count,
                                       ChimeraColoring coloring) {
    constexpr std::size_t kHidden = 16;
    std::vector<Coupling> edges;
    for (std::size_t cell = 0; cell < 2; ++cell) {
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) edges.push_back({cell * 8 + i, cell * 8 + 4 + j, 0.0});
        }
    }
    for (std::size_t k = 0; k < 4; ++k) edges.push_back({4 + k, 12 + k, 0.0});

    auto vertical = [](std::size_t q) { return q % 8 < 4; };
    const bool states_vertical = coloring == ChimeraColoring::states_on_vertical;
    std::vector<std::uint8_t> adjacency((state_count + action_count) * kHidden, 0);
    for (std::size_t v = 0; v < state_count + action_count; ++v) {
        const bool is_state = v < state_count;
        for (std::size_t q = 0; q < kHidden; ++q) {
            const bool blue = vertical(q) == states_vertical;
            adjacency[v * kHidden + q] = is_state == blue;
        }
    }
    return {TopologyKind::chimera, state_count, action_count, kHidden, std::move(adjacency), std::move(edges)};
}

NetworkTopology build_dbm(std::size_t state_count, std::size_t action_count,
                          std::span<const std::size_t> layer_sizes) {
    static constexpr std::size_t kDefaultLayers[] = {8, 8};
    if (layer_sizes.empty()) layer_sizes = kDefaultLayers;
    std::vector<std::size_t> offsets;
    std::size_t hidden = 0;
    for (auto size : layer_sizes) {
        if (size == 0) throw ContractError("build_dbm: layer sizes must be positive");
        offsets.push_back(hidden);
        hidden += size;
    }
    std::vector<Coupling> edges;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        for (std::size_t i = 0; i < layer_sizes[l]; ++i) {
            for (std::size_t j = 0; j < layer_sizes[l + 1]; ++j) {
                edges.push_back({offsets[l] + i, offsets[l + 1] + j, 0.0});
            }
        }
    }
    std::vector<std::uint8_t> adjacency((state_count + action_count) * hidden, 0);
    const std::size_t last = layer_sizes.size() - 1;
    for (std::size_t v = 0; v < state_count + action_count; ++v) {
        const std::size_t layer = v < state_count ? 0 : last;
        for (std::size_t i = 0; i < layer_sizes[layer]; ++i) adjacency[v * hidden + offsets[layer] + i] = 1;
    }
    return {TopologyKind::dbm, state_count, action_count, hidden, std::move(adjacency), std::move(edges)};
}

NetworkTopology build_rbm(std::size_t state_count, std::size_t action_count, std::size_t hidden_count) {
    if (hidden_count < 1) throw ContractError("build_rbm: hidden_count must be >= 1");
    std::vector<std::uint8_t> adjacency((state_count + action_count) * hidden_count, 1);
    return {TopologyKind::rbm, state_count, action_count, hidden_count, std::move(adjacency), {}};
}

NetworkTopology init_weights(const NetworkTopology& topology, Rng& rng, double scale, double hidden_scale) {
    for (double x : {scale, hidden_scale}) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ContractError("init_weights: scales must be finite and >= 0");
    }
    NetworkTopology out = topology;
    auto draw = [&](double range) { return range * (2.0 * uniform01(rng) - 1.0); };
    for (std::size_t v = 0; v < out.visible_count(); ++v) {
        for (std::size_t h = 0; h < out.hidden_count(); ++h) {
            if (out.connected(v, h)) out.set_visible_hidden(v, h, draw(scale));
        }
    }
    for (std::size_t e = 0; e < out.hidden_hidden_edge_count(); ++e) out.set_hidden_weight(e, draw(hidden_scale));
    return out;
}

std::vector<double> fold_visible(const NetworkTopology& topology, std::span<const double> visible_values) {
    if (visible_values.size() != topology.visible_count()) {
        throw ContractError("fold_visible: expected " + std::to_string(topology.visible_count()) + " visible values");
    }
    std::vector<double> biases(topology.hidden_count(), 0.0);
    for (std::size_t v = 0; v < visible_values.size(); ++v) {
        if (visible_values[v] == 0.0) continue;
        const auto row = topology.visible_row(v);
        for (std::size_t h = 0; h < biases.size(); ++h) biases[h] += row[h] * visible_values[v];
    }
    return biases;
}

namespace {

std::size_t one_hot_position(std::span<const std::uint8_t> encoding, std::size_t width, const char* what) {
    if (encoding.size() != width) {
        throw ContractError(std::string(what) + " encoding has width " + std::to_string(encoding.size()) +
                            ", expected " + std::to_string(width));
    }
    std::size_t pos = width;
    for (std::size_t i = 0; i < width; ++i) {
        if (encoding[i] > 1) throw ContractError(std::string(what) + " encoding is not binary");
        if (encoding[i] == 1) {
            if (pos != width) throw ContractError(std::string(what) + " encoding is not one-hot");
            pos = i;
        }
    }
    if (pos == width) throw ContractError(std::string(what) + " encoding is not one-hot");
    return pos;
}

}  // namespace

ClampedModel clamp(const NetworkTopology& topology, std::span<const std::uint8_t> state_encoding,
                   std::span<const std::uint8_t> action_encoding) {
    const auto s = one_hot_position(state_encoding, topology.state_count(), "state");
    const auto a = one_hot_position(action_encoding, topology.action_count(), "action");
    return clamp(topology, s, a);
}

ClampedModel clamp(const NetworkTopology& topology, std::size_t state, std::size_t action) {
    if (state >= topology.state_count() || action >= topology.action_count()) {
        throw ContractError("clamp: state/action out of range");
    }
    const auto srow = topology.visible_row(state);
    const auto arow = topology.visible_row(topology.state_count() + action);
    std::vector<double> biases(topology.hidden_count());
    for (std::size_t h = 0; h < biases.size(); ++h) biases[h] = srow[h] + arow[h];
    auto edges = topology.hidden_edges();
    return {std::move(biases), std::vector<Coupling>(edges.begin(), edges.end())};
}

void save_topology(std::ostream& out, const NetworkTopology& topology) {
    out << "ferl-topology 1\n";
    out << "kind " << to_string(topology.kind()) << '\n';
    out << "nodes " << topology.state_count() << ' ' << topology.action_count() << ' ' << topology.hidden_count()
        << '\n';
    const std::size_t hidden_base = topology.visible_count();
    char buf[64];
    for (std::size_t v = 0; v < topology.visible_count(); ++v) {
        for (std::size_t h = 0; h < topology.hidden_count(); ++h) {
            if (!topology.connected(v, h)) continue;
            std::snprintf(buf, sizeof buf, "%.17g", topology.visible_hidden(v, h));
            out << "edge " << v << ' ' << hidden_base + h << ' ' << buf << '\n';
        }
    }
    for (const auto& e : topology.hidden_edges()) {
        std::snprintf(buf, sizeof buf, "%.17g", e.weight);
        out << "edge " << hidden_base + e.first << ' ' << hidden_base + e.second << ' ' << buf << '\n';
    }
}

NetworkTopology load_topology(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> std::istringstream {
        if (!std::getline(in, line)) throw ParseError("unexpected end of checkpoint", lineno + 1);
        ++lineno;
        return std::istringstream(line);
    };

    {
        auto ls = next_line();
        std::string magic;
        int version = 0;
        if (!(ls >> magic >> version) || magic != "ferl-topology" || version != 1) {
            throw ParseError("expected header 'ferl-topology 1'", lineno);
        }
    }
    TopologyKind kind = TopologyKind::custom;
    {
        auto ls = next_line();
        std::string key, value;
        if (!(ls >> key >> value) || key != "kind") throw ParseError("expected 'kind <name>'", lineno);
        if (value == "chimera") kind = TopologyKind::chimera;
        else if (value == "dbm") kind = TopologyKind::dbm;
        else if (value == "rbm") kind = TopologyKind::rbm;
        else if (value == "custom") kind = TopologyKind::custom;
        else throw ParseError("unknown topology kind '" + value + "'", lineno);
    }
    std::size_t states = 0, actions = 0, hidden = 0;
    {
        auto ls = next_line();
        std::string key;
        if (!(ls >> key >> states >> actions >> hidden) || key != "nodes") {
            throw ParseError("expected 'nodes <states> <actions> <hidden>'", lineno);
        }
    }
    const std::size_t visible = states + actions;
    struct Weighted {
        std::size_t v, h;
        double w;
    };
    std::vector<Weighted> vh;
    std::vector<Coupling> hh;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key, weight_text;
        std::size_t u = 0, v = 0;
        if (!(ls >> key >> u >> v >> weight_text) || key != "edge") {
            throw ParseError("expected 'edge <u> <v> <weight>'", lineno);
        }
        double w = 0.0;
        const auto [ptr, ec] = std::from_chars(weight_text.data(), weight_text.data() + weight_text.size(), w);
        if (ec != std::errc{} || ptr != weight_text.data() + weight_text.size() || !std::isfinite(w)) {
            throw ParseError("bad weight '" + weight_text + "'", lineno);
        }
        if (u > v) std::swap(u, v);
        if (v >= visible + hidden) throw ParseError("node id out of range", lineno);
        if (u < visible && v >= visible) {
            vh.push_back({u, v - visible, w});
        } else if (u >= visible) {
            hh.push_back({u - visible, v - visible, w});
        } else {
            throw ParseError("visible-visible edges are not supported", lineno);
        }
    }
    std::vector<std::uint8_t> adjacency(visible * hidden, 0);
    for (const auto& e : vh) {
        if (adjacency[e.v * hidden + e.h]) throw ParseError("duplicate edge", lineno);
        adjacency[e.v * hidden + e.h] = 1;
    }
    NetworkTopology topo(kind, states, actions, hidden, std::move(adjacency), std::move(hh));
    for (const auto& e : vh) topo.set_visible_hidden(e.v, e.h, e.w);
    return topo;
}

}  // namespace ferl
