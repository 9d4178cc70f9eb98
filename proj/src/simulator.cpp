#include "radice/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "radice/error.hpp"

namespace radice {

namespace {

constexpr double kUnstable = 1e6;

}  // namespace

double GroundTruthGraph::weight(const DirectedEdge& e) const {
    auto it = weights.find(e);
    if (it == weights.end()) throw InvalidArgument("ground truth: edge without weight");
    return it->second;
}

void GroundTruthGraph::validate() const {
    if (!graph.undirected().empty()) throw InvalidArgument("ground truth: undirected edges are not allowed");
    for (const auto& e : graph.directed()) {
        if (!std::isfinite(weight(e))) throw InvalidArgument("ground truth: non-finite weight");
    }
    if (weights.size() != graph.directed().size()) throw InvalidArgument("ground truth: weight for a missing edge");
    const std::size_t sink = graph.require(performance);
    for (const auto& r : eligible_roots) {
        const std::size_t v = graph.require(r);
        if (v == sink || !graph.has_causal_path(v, sink)) {
            throw InvalidArgument("ground truth: eligible root '" + r + "' has no path to '" + performance + "'");
        }
    }
}

GroundTruthGraph ground_truth_from_json(const nlohmann::json& j) {
    GroundTruthGraph g;
    try {
        g.graph = graph_from_json(j);
        g.performance = j.at("performance").get<std::string>();
        g.eligible_roots = j.at("eligible_roots").get<std::vector<std::string>>();
        const auto& dir = j.contains("directed") ? j.at("directed") : nlohmann::json::array();
        std::vector<double> w;
        if (j.contains("weights")) {
            w = j.at("weights").get<std::vector<double>>();
            if (w.size() != dir.size()) throw ParseError("ground truth: weights must align with directed edges");
        } else {
            w.assign(dir.size(), 0.5);
        }
        for (std::size_t k = 0; k < dir.size(); ++k) {
            const DirectedEdge e{g.graph.require(dir[k].at(0).get<std::string>()),
                                 g.graph.require(dir[k].at(1).get<std::string>()), dir[k].at(2).get<int>()};
            g.weights[e] = w[k];
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("ground truth: ") + ex.what());
    }
    g.validate();
    return g;
}

nlohmann::json ground_truth_to_json(const GroundTruthGraph& g) {
    nlohmann::json j = graph_to_json(g.graph);
    nlohmann::json w = nlohmann::json::array();
    for (const auto& e : g.graph.directed()) w.push_back(g.weight(e));
    j["weights"] = w;
    j["eligible_roots"] = g.eligible_roots;
    j["performance"] = g.performance;
    return j;
}

GroundTruthGraph load_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError("'" + path.string() + "': " + ex.what());
    }
    return ground_truth_from_json(j);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
    // splitmix64 finaliser over a golden-ratio stride.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (k + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

GroundTruthGraph randomize_weights(const GroundTruthGraph& g, std::uint64_t seed) {
    GroundTruthGraph out = g;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.1, 0.9);
    for (auto& [edge, w] : out.weights) w = dist(rng);
    return out;
}

std::vector<Series> draw_noise(std::size_t num_vars, std::size_t columns, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<Series> noise(num_vars, Series(columns));
    for (std::size_t t = 0; t < columns; ++t) {
        for (std::size_t v = 0; v < num_vars; ++v) noise[v][t] = dist(rng);
    }
    return noise;
}

std::vector<Series> run_scm(const GroundTruthGraph& g, const std::vector<Series>& noise) {
    const std::size_t n = g.graph.num_vertices();
    if (noise.size() != n) throw InvalidArgument("run_scm: noise rows must match vertices");
    const std::size_t len = n == 0 ? 0 : noise.front().size();
    const auto order = lag0_topological_order(g.graph);

    std::vector<std::vector<std::pair<DirectedEdge, double>>> parents(n);
    for (const auto& e : g.graph.directed()) parents[e.to].emplace_back(e, g.weight(e));

    std::vector<Series> x(n, Series(len, 0.0));
    for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t v : order) {
            double value = noise[v][t];
            for (const auto& [e, w] : parents[v]) {
                const auto lag = static_cast<std::size_t>(e.lag);
                if (t >= lag) value += w * x[e.from][t - lag];
            }
            if (!(std::abs(value) <= kUnstable)) {
                throw InvalidArgument("unstable system: values exceed 1e6; rescale the edge weights");
            }
            x[v][t] = value;
        }
    }
    return x;
}

namespace {

TimeSeriesDataset to_dataset(const GroundTruthGraph& g, std::vector<Series> full, std::size_t burn_in) {
    for (auto& s : full) s.erase(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(burn_in));
    return TimeSeriesDataset(g.graph.vertices(), std::move(full));
}

}  // namespace

TimeSeriesDataset generate(const GroundTruthGraph& g, std::size_t length, std::uint64_t seed, std::size_t burn_in) {
    if (length == 0) throw InvalidArgument("generate: length must be positive");
    const auto noise = draw_noise(g.graph.num_vertices(), length + burn_in, seed);
    return to_dataset(g, run_scm(g, noise), burn_in);
}

AnomalyWindow central_window(std::size_t length) {
    const std::size_t n = length / 3;
    if (n < 2) throw InvalidArgument("central_window: length must be at least 6");
    return AnomalyWindow{n, 2 * n - 1};
}

SimRun inject_anomaly(const GroundTruthGraph& g, std::uint64_t seed, const SimulationConfig& config) {
    if (g.eligible_roots.empty()) throw InvalidArgument("inject_anomaly: no eligible roots");
    const AnomalyWindow window = central_window(config.length);

    std::mt19937_64 pick(derive_seed(seed, 1));
    std::uniform_int_distribution<std::size_t> which(0, g.eligible_roots.size() - 1);
    const std::string root = g.eligible_roots[which(pick)];
    const std::size_t r = g.graph.require(root);

    auto noise = draw_noise(g.graph.num_vertices(), config.length + config.burn_in, seed);
    for (std::size_t t = window.start; t <= window.end; ++t) noise[r][config.burn_in + t] -= config.delta;

    SimRun run;
    run.dataset = to_dataset(g, run_scm(g, noise), config.burn_in);
    run.injected_root = root;
    run.anomaly_window = window;
    run.seed = seed;
    for (std::size_t v = 0; v < g.graph.num_vertices(); ++v) {
        if (v == r || g.graph.has_causal_path(r, v)) run.affected.push_back(g.graph.name(v));
    }
    std::sort(run.affected.begin(), run.affected.end());
    return run;
}

SimRun simulate_run(const GroundTruthGraph& g, std::uint64_t seed, const SimulationConfig& config) {
    return inject_anomaly(randomize_weights(g, derive_seed(seed, 0)), seed, config);
}

nlohmann::json sim_run_to_json(const SimRun& run) {
    return nlohmann::json{{"seed", run.seed},
                          {"injected_root", run.injected_root},
                          {"window", {run.anomaly_window.start, run.anomaly_window.end}},
                          {"affected", run.affected}};
}

}  // namespace radice
