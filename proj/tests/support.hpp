#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "radice/causal_graph.hpp"
#include "radice/dataset.hpp"
#include "radice/simulator.hpp"

namespace testing {

inline std::filesystem::path source_dir() {
    const char* env = std::getenv("RADICE_SOURCE_DIR");
    return env ? std::filesystem::path(env) : std::filesystem::current_path();
}

inline std::filesystem::path fixture(const std::string& rel) { return source_dir() / "fixtures" / rel; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    static std::uint64_t counter = 0;
    std::random_device rd;
    auto dir = std::filesystem::temp_directory_path() /
               ("radice-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::vector<std::string> names(std::size_t n, const std::string& prefix = "X") {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

inline radice::Series gaussian(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> dist;
    radice::Series x(n);
    for (auto& v : x) v = dist(rng);
    return x;
}

inline radice::Series random_walk(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> dist;
    radice::Series x(n);
    double acc = 0;
    for (auto& v : x) v = acc += dist(rng);
    return x;
}

/// Random DAG whose lag-0 edges follow a random vertex order; lagged edges go anywhere.
inline radice::CausalGraph random_dag(std::size_t n, double p0, double p1, std::mt19937_64& rng,
                                      double p_undirected = 0.0) {
    radice::CausalGraph g(names(n));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_real_distribution<double> u(0, 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = u(rng);
            if (r < p_undirected) {
                g.add_undirected(order[i], order[j]);
            } else if (r < p_undirected + p0) {
                g.add_directed(order[i], order[j], 0);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && u(rng) < p1) g.add_directed(i, j, 1);
        }
    }
    return g;
}

/// The eight-metric illustration: X2 is the root, X7 the performance metric,
/// X4 and X5 lie between them, X3, X6 and X8 are affected side branches.
inline radice::GroundTruthGraph illustration_graph() {
    radice::GroundTruthGraph t;
    t.graph = radice::CausalGraph({"X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8"});
    const std::vector<std::pair<std::string, std::string>> edges{
        {"X1", "X2"}, {"X2", "X3"}, {"X2", "X4"}, {"X4", "X5"}, {"X4", "X6"}, {"X5", "X7"}, {"X5", "X8"}};
    for (const auto& [a, b] : edges) {
        t.graph.add_directed(a, b, 0);
        t.weights[{t.graph.require(a), t.graph.require(b), 0}] = 0.6;
    }
    t.performance = "X7";
    t.eligible_roots = {"X2"};
    return t;
}

}  // namespace testing
