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

#include "ferl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "ferl/errors.hpp"
#include "json.hpp"

namespace ferl {

namespace {

constexpr std::array<std::string_view, kMethods.size()> kMethodNames{
    "rbm",         "sa-bipartite",     "sa-chimera",         "sqa-bipartite",
    "sqa-chimera", "external-stacked", "external-classical", "dqn"};

std::size_t method_index(Method m) { return static_cast<std::size_t>(m); }

bool uses_chimera(Method m) {
    return m == Method::sa_chimera || m == Method::sqa_chimera || m == Method::external_stacked ||
           m == Method::external_classical;
}

}  // namespace

std::string_view to_string(Method m) { return kMethodNames.at(method_index(m)); }

Method parse_method(std::string_view name) {
    for (std::size_t i = 0; i < kMethods.size(); ++i) {
        if (kMethodNames[i] == name) return kMethods[i];
    }
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

MethodSettings default_settings(Method m) {
    MethodSettings s;
    auto& a = s.agent;
    a.virtual_params = {0.5, 2.0, 25};
    switch (m) {
        case Method::rbm:
            a.backend = Backend::rbm;
            a.learning_rate = 0.04;
            s.init_scale = 25.0;
            break;
        // Sampled variants: broad initial couplings keep hidden units from
        // saturating together early, which otherwise collapses Q to a sum of
        // state and action terms.
        case Method::sa_bipartite:
        case Method::sa_chimera:
            a.backend = Backend::sa;
            a.learning_rate = 0.03;
            a.sa = {20, 10, 0.1};
            s.init_scale = 50.0;
            s.hidden_init_scale = 50.0;
            break;
        case Method::sqa_bipartite:
        case Method::sqa_chimera:
            a.backend = Backend::sqa;
            a.learning_rate = 0.05;
            a.virtual_params.replicas = 5;
            a.sqa = {10, 10, 2.0};
            s.init_scale = 50.0;
            s.hidden_init_scale = 50.0;
            break;
        case Method::external_stacked:
        case Method::external_classical:
            a.backend = m == Method::external_stacked ? Backend::external_stacked : Backend::external_classical;
            a.learning_rate = 0.05;
            a.virtual_params.replicas = 5;
            a.external.annealer = {AnnealerKind::sqa, 2.0, 0.5, 4, 10, 2.0, 50, SpinConvention::spin};
            a.external.stacked_count = 10;
            s.init_scale = 50.0;
            s.hidden_init_scale = 50.0;
            break;
        case Method::dqn:
            break;
    }
    return s;
}

NetworkTopology build_network(Method m, const MethodSettings& settings, std::size_t state_count) {
    if (m == Method::dqn) throw ContractError("build_network: dqn has no Boltzmann machine");
    if (m == Method::rbm) return build_rbm(state_count, kActionCount, settings.hidden_count);
    if (uses_chimera(m)) return build_chimera_two_cell(state_count, kActionCount);
    return build_dbm(state_count, kActionCount);
}

std::uint64_t run_seed(std::uint64_t master, Method method, std::size_t run) {
    return mix_seed(mix_seed(master, method_index(method)), run);
}

TrainingHistory run_once(const GridWorld& env, const MethodSpec& spec, std::uint64_t seed,
                         NetworkTopology* final_weights) {
    if (spec.method == Method::dqn) {
        auto dqn = spec.settings.dqn;
        if (!dqn.widths.empty()) dqn.widths.front() = env.state_count();
        return train_dqn(env, dqn, seed);
    }
    Rng rng(seed);
    const auto& s = spec.settings;
    const auto initial =
        init_weights(build_network(spec.method, s, env.state_count()), rng, s.init_scale, s.hidden_init_scale);
    auto run = train(env, initial, s.agent, rng());
    if (final_weights) *final_weights = std::move(run.final_weights);
    return std::move(run.history);
}

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void validate_settings(Method m, const MethodSettings& s) {
    try {
        if (m == Method::dqn) {
            s.dqn.validate();
        } else {
            s.agent.validate();
        }
    } catch (const ContractError& e) {
        throw ConfigError(std::string(to_string(m)) + ": " + e.what());
    }
    require(std::isfinite(s.init_scale) && s.init_scale >= 0.0, "init_scale must be >= 0");
    require(std::isfinite(s.hidden_init_scale) && s.hidden_init_scale >= 0.0, "hidden_init_scale must be >= 0");
    require(s.hidden_count >= 1, "hidden_count must be >= 1");
}

/// Runs task(i) for i in [0, count) on `jobs` threads; rethrows the first
/// failure in index order.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min(std::max<std::size_t>(jobs, 1), std::max<std::size_t>(count, 1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

std::string format_grid_value(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

}  // namespace

void CurvesSpec::validate() const {
    require(!methods.empty(), "curves: no methods");
    require(runs >= 1, "curves: runs must be >= 1");
    require(samples >= 1, "curves: samples must be >= 1");
    for (const auto& m : methods) validate_settings(m.method, m.settings);
}

std::vector<CurveResult> run_learning_curves(const CurvesSpec& spec, const RunOptions& options) {
    spec.validate();
    if (options.checkpoint_dir) {
        std::error_code ec;
        std::filesystem::create_directories(*options.checkpoint_dir, ec);
        if (ec) throw std::runtime_error("cannot create checkpoint directory " + options.checkpoint_dir->string());
    }
    std::vector<MethodSpec> methods = spec.methods;
    for (auto& m : methods) {
        m.settings.agent.training_samples = spec.samples;
        m.settings.dqn.training_samples = spec.samples;
    }
    const std::size_t runs = spec.runs;
    std::vector<TrainingHistory> histories(methods.size() * runs);
    parallel_for(histories.size(), options.jobs, [&](std::size_t i) {
        const auto& m = methods[i / runs];
        const std::size_t run = i % runs;
        const std::uint64_t seed = run_seed(spec.seed, m.method, run);
        if (options.checkpoint_dir && m.method != Method::dqn) {
            NetworkTopology weights;
            histories[i] = run_once(spec.env, m, seed, &weights);
            const auto path =
                *options.checkpoint_dir / (std::string(to_string(m.method)) + "-" + std::to_string(run) + ".topology");
            std::ofstream out(path);
            if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
            save_topology(out, weights);
        } else {
            histories[i] = run_once(spec.env, m, seed);
        }
    });

    const auto optimal = value_iteration(spec.env).optimal;
    std::vector<CurveResult> results;
    results.reserve(methods.size());
    for (std::size_t k = 0; k < methods.size(); ++k) {
        std::span<const TrainingHistory> block(histories.data() + k * runs, runs);
        results.push_back({methods[k].method, fidelity(block, optimal)});
    }
    return results;
}

void write_curves_csv(std::ostream& out, std::span<const CurveResult> results) {
    out << "method,sample,mean_fidelity,stderr\n";
    for (const auto& r : results) {
        for (std::size_t i = 0; i < r.curve.mean.size(); ++i) {
            out << to_string(r.method) << ',' << (i + 1) << ',' << format_double(r.curve.mean[i]) << ','
                << format_double(r.curve.stderr_of_mean[i]) << '\n';
        }
    }
}

void HeatmapSpec::validate() const {
    require(!betas.empty() && !gammas.empty(), "heatmap: beta and gamma grids must be nonempty");
    for (double b : betas) require(std::isfinite(b) && b > 0.0, "heatmap: beta values must be > 0");
    for (double g : gammas) require(std::isfinite(g) && g >= 0.0, "heatmap: gamma values must be >= 0");
    require(runs >= 1, "heatmap: runs must be >= 1");
    require(samples >= 1, "heatmap: samples must be >= 1");
    require(settings.agent.backend == Backend::external_stacked || settings.agent.backend == Backend::sqa,
            "heatmap: backend must be external-stacked or sqa");
    validate_settings(Method::external_stacked, settings);
}

std::uint64_t cell_seed(std::uint64_t master, double beta, double gamma, std::size_t run) {
    const auto cell = mix_seed(mix_seed(master, std::bit_cast<std::uint64_t>(beta)), std::bit_cast<std::uint64_t>(gamma));
    return mix_seed(cell, run);
}

std::vector<HeatmapCell> run_heatmap(const HeatmapSpec& spec, const RunOptions& options) {
    spec.validate();
    const std::size_t cells = spec.betas.size() * spec.gammas.size();
    const std::size_t runs = spec.runs;
    std::vector<double> run_average(cells * runs, 0.0);
    const auto optimal = value_iteration(spec.env).optimal;
    parallel_for(run_average.size(), options.jobs, [&](std::size_t i) {
        const std::size_t cell = i / runs;
        const double beta = spec.betas[cell / spec.gammas.size()];
        const double gamma = spec.gammas[cell % spec.gammas.size()];
        MethodSpec m{Method::external_stacked, spec.settings};
        m.settings.agent.training_samples = spec.samples;
        m.settings.agent.virtual_params.beta = beta;
        m.settings.agent.virtual_params.gamma = gamma;
        if (gamma == 0.0 && m.settings.agent.backend == Backend::sqa) m.settings.agent.backend = Backend::sa;
        const auto history = run_once(spec.env, m, cell_seed(spec.seed, beta, gamma, i % runs));
        double sum = 0.0;
        for (const auto& snapshot : history.snapshots) sum += policy_fidelity(snapshot, optimal);
        run_average[i] = sum / static_cast<double>(history.snapshots.size());
    });

    std::vector<HeatmapCell> out;
    out.reserve(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < runs; ++r) sum += run_average[c * runs + r];
        out.push_back({spec.betas[c / spec.gammas.size()], spec.gammas[c % spec.gammas.size()],
                       sum / static_cast<double>(runs)});
    }
    return out;
}

void write_heatmap_csv(std::ostream& out, std::span<const HeatmapCell> cells) {
    out << "beta,gamma,avg_fidelity\n";
    for (const auto& c : cells) {
        out << format_grid_value(c.beta) << ',' << format_grid_value(c.gamma) << ',' << format_double(c.avg_fidelity)
            << '\n';
    }
}

ExperimentConfig default_config() {
    ExperimentConfig config;
    for (Method m : {Method::rbm, Method::sa_bipartite, Method::sa_chimera, Method::sqa_bipartite,
                     Method::sqa_chimera, Method::dqn}) {
        config.curves.methods.push_back({m, default_settings(m)});
    }
    return config;
}

namespace {

using nlohmann::json;

class ObjectReader {
   public:
    ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        require(j.is_object(), where_ + ": expected an object");
    }

    template <typename T>
    void read(const char* key, T& value) {
        auto it = j_.find(key);
        if (it == j_.end()) return;
        seen_.push_back(key);
        try {
            value = it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where_ + "." + key + ": wrong type");
        }
    }

    const json* child(const char* key) {
        auto it = j_.find(key);
        if (it == j_.end()) return nullptr;
        seen_.push_back(key);
        return &*it;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
                throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
            }
        }
    }

   private:
    const json& j_;
    std::string where_;
    std::vector<std::string> seen_;
};

template <typename T>
void read_positive(ObjectReader& r, const char* key, T& value, const std::string& where) {
    json::number_integer_t raw = static_cast<json::number_integer_t>(value);
    r.read(key, raw);
    require(raw >= 0, where + "." + key + ": must be >= 0");
    value = static_cast<T>(raw);
}

void read_annealer(const json& j, AnnealerSettings& a, const std::string& where) {
    ObjectReader r(j, where);
    std::string kind = a.kind == AnnealerKind::sqa ? "sqa" : "sa";
    r.read("kind", kind);
    require(kind == "sqa" || kind == "sa", where + ".kind: expected 'sqa' or 'sa'");
    a.kind = kind == "sqa" ? AnnealerKind::sqa : AnnealerKind::sa;
    r.read("beta", a.beta);
    r.read("gamma", a.gamma);
    read_positive(r, "replicas", a.replicas, where);
    read_positive(r, "sweeps", a.sweeps, where);
    r.read("schedule_start", a.schedule_start);
    read_positive(r, "reads", a.reads, where);
    r.finish();
}

void read_settings(const json& j, Method m, MethodSettings& s, const std::string& where) {
    ObjectReader r(j, where);
    std::string ignored;
    r.read("method", ignored);
    if (m == Method::dqn) {
        r.read("learning_rate", s.dqn.learning_rate);
        r.read("discount", s.dqn.discount);
        r.read("explore", s.dqn.explore);
        r.read("init_scale", s.dqn.init_scale);
        r.read("widths", s.dqn.widths);
        r.finish();
        return;
    }
    auto& a = s.agent;
    r.read("learning_rate", a.learning_rate);
    r.read("discount", a.discount);
    r.read("explore", a.explore);
    std::string next = a.next_action == NextActionRule::greedy ? "greedy" : "on-policy";
    r.read("next_action", next);
    require(next == "greedy" || next == "on-policy", where + ".next_action: expected 'greedy' or 'on-policy'");
    a.next_action = next == "greedy" ? NextActionRule::greedy : NextActionRule::on_policy;
    r.read("beta", a.virtual_params.beta);
    r.read("gamma", a.virtual_params.gamma);
    read_positive(r, "replicas", a.virtual_params.replicas, where);
    r.read("init_scale", s.init_scale);
    r.read("hidden_init_scale", s.hidden_init_scale);
    read_positive(r, "hidden_count", s.hidden_count, where);
    if (a.backend == Backend::sa) {
        read_positive(r, "sweeps", a.sa.sweeps, where);
        read_positive(r, "reads", a.sa.reads, where);
        r.read("schedule_start", a.sa.beta_initial);
    } else if (a.backend == Backend::sqa) {
        read_positive(r, "sweeps", a.sqa.sweeps, where);
        read_positive(r, "reads", a.sqa.reads, where);
        r.read("schedule_start", a.sqa.gamma_initial);
    } else if (a.backend == Backend::external_stacked || a.backend == Backend::external_classical) {
        read_positive(r, "stacked_count", a.external.stacked_count, where);
        if (const json* ann = r.child("annealer")) read_annealer(*ann, a.external.annealer, where + ".annealer");
    }
    r.finish();
}

MethodSpec read_method(const json& j, const std::string& where) {
    if (j.is_string()) {
        const Method m = parse_method(j.get<std::string>());
        return {m, default_settings(m)};
    }
    require(j.is_object() && j.contains("method") && j["method"].is_string(),
            where + ": expected a method name or an object with a 'method' key");
    const Method m = parse_method(j["method"].get<std::string>());
    MethodSpec spec{m, default_settings(m)};
    read_settings(j, m, spec.settings, where);
    return spec;
}

GridWorld read_environment(const json& j) {
    ObjectReader r(j, "environment");
    std::vector<std::string> map;
    CellValues values;
    double discount = 0.8;
    r.read("map", map);
    r.read("reward", values.reward);
    r.read("neutral", values.neutral);
    r.read("penalty", values.penalty);
    r.read("discount", discount);
    r.finish();
    if (map.empty()) return GridWorld::canonical().with_discount(discount);
    std::string text;
    for (const auto& row : map) text += row + "\n";
    std::istringstream in(text);
    try {
        return GridWorld::parse(in, values, discount);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("environment: ") + e.what());
    }
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    ExperimentConfig config = default_config();
    ObjectReader top(root, "config");
    std::uint64_t seed = config.curves.seed;
    top.read("seed", seed);
    config.curves.seed = seed;
    config.heatmap.seed = seed;
    if (const json* env = top.child("environment")) {
        config.curves.env = read_environment(*env);
        config.heatmap.env = config.curves.env;
    }
    if (const json* c = top.child("curves")) {
        ObjectReader r(*c, "curves");
        r.read("seed", config.curves.seed);
        read_positive(r, "runs", config.curves.runs, "curves");
        read_positive(r, "samples", config.curves.samples, "curves");
        if (const json* methods = r.child("methods")) {
            require(methods->is_array(), "curves.methods: expected an array");
            config.curves.methods.clear();
            for (std::size_t i = 0; i < methods->size(); ++i) {
                config.curves.methods.push_back(read_method((*methods)[i], "curves.methods[" + std::to_string(i) + "]"));
            }
        }
        r.finish();
    }
    if (const json* h = top.child("heatmap")) {
        ObjectReader r(*h, "heatmap");
        r.read("seed", config.heatmap.seed);
        r.read("betas", config.heatmap.betas);
        r.read("gammas", config.heatmap.gammas);
        read_positive(r, "runs", config.heatmap.runs, "heatmap");
        read_positive(r, "samples", config.heatmap.samples, "heatmap");
        if (const json* s = r.child("settings")) {
            read_settings(*s, Method::external_stacked, config.heatmap.settings, "heatmap.settings");
        }
        r.finish();
    }
    top.finish();
    config.curves.validate();
    config.heatmap.validate();
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_config(text.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace ferl
