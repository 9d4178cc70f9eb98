#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "radice/anomaly_window.hpp"
#include "radice/causal_graph.hpp"
#include "radice/dataset.hpp"

namespace radice {

/// Weighted structure with a designated performance sink.
struct GroundTruthGraph {
    CausalGraph graph;
    std::map<DirectedEdge, double> weights;
    std::string performance;
    std::vector<std::string> eligible_roots;

    double weight(const DirectedEdge& e) const;
    /// Throws InvalidArgument on missing or non-finite weights, unknown metrics,
    /// undirected edges, or eligible roots without a path to the sink.
    void validate() const;
};

/// Graph JSON plus `"weights"` (aligned with `"directed"`; defaults to 0.5),
/// `"eligible_roots"` and `"performance"`.
GroundTruthGraph ground_truth_from_json(const nlohmann::json& j);
nlohmann::json ground_truth_to_json(const GroundTruthGraph& g);
GroundTruthGraph load_ground_truth(const std::filesystem::path& path);

/// Independent stream for sub-task `k` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

/// Every weight drawn i.i.d. from Uniform(0.1, 0.9).
GroundTruthGraph randomize_weights(const GroundTruthGraph& g, std::uint64_t seed);

struct SimulationConfig {
    std::size_t length = 99;
    std::size_t burn_in = 50;
    /// Level drop applied to the root's noise, in noise-std units.
    double delta = 3.0;
};

/// Standard-normal noise, one row per vertex, `length + burn_in` columns.
std::vector<Series> draw_noise(std::size_t num_vars, std::size_t columns, std::uint64_t seed);

/// Evaluates the linear SCM over the given noise; throws InvalidArgument when
/// any value exceeds 1e6 in magnitude.
std::vector<Series> run_scm(const GroundTruthGraph& g, const std::vector<Series>& noise);

TimeSeriesDataset generate(const GroundTruthGraph& g, std::size_t length, std::uint64_t seed, std::size_t burn_in = 50);

struct SimRun {
    TimeSeriesDataset dataset;
    std::string injected_root;
    AnomalyWindow anomaly_window;
    /// The root and every vertex it reaches, sorted by name.
    std::vector<std::string> affected;
    std::uint64_t seed = 0;
};

/// Central third [n, 2n) with n = length / 3.
AnomalyWindow central_window(std::size_t length);

/// Picks a root uniformly, lowers its noise by `delta` over the central third
/// and re-simulates. The unperturbed dataset is `generate(g, length, seed, burn_in)`.
SimRun inject_anomaly(const GroundTruthGraph& g, std::uint64_t seed, const SimulationConfig& config = {});

/// One evaluation dataset: fresh weights, then `inject_anomaly`, both keyed by `seed`.
SimRun simulate_run(const GroundTruthGraph& g, std::uint64_t seed, const SimulationConfig& config = {});

nlohmann::json sim_run_to_json(const SimRun& run);

}  // namespace radice
