#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "radice/causal_graph.hpp"
#include "radice/dataset.hpp"

namespace radice {

struct EntropyConfig {
    /// Quantile (equal-mass) bins per series.
    int bins = 8;
    /// Entropy gap in bits below which a verdict is inconclusive.
    double min_gap = 0.05;

    void validate() const;
};

enum class Direction { Forward, Backward, Inconclusive };

struct OrientationVerdict {
    Direction direction = Direction::Inconclusive;
    /// |H(u) + H(E_uv) - H(v) - H(E_vu)| in bits.
    double score = 0.0;
    double forward_entropy = 0.0;   ///< H(u) + H(E) for u -> v
    double backward_entropy = 0.0;  ///< H(v) + H(E) for v -> u
};

/// Row-major joint distribution P(row = i, col = j).
using JointTable = std::vector<std::vector<double>>;

double entropy_bits(std::span<const double> p);

/// Greedy minimum-entropy coupling: repeatedly joins the largest remaining
/// mass of every marginal into one atom of size min_i max_i. Returns the atoms.
std::vector<double> greedy_coupling(std::vector<std::vector<double>> marginals);
double greedy_coupling_entropy(const std::vector<std::vector<double>>& marginals);

/// H(row) + H(E) where col = f(row, E) with E the greedy coupling of the
/// conditionals P(col | row = r).
double causal_entropy(const JointTable& joint);

/// Verdict for row -> col versus col -> row.
OrientationVerdict orient_joint(const JointTable& joint, double min_gap);

/// Equal-mass bin index per sample; ties share a bin.
std::vector<int> quantile_bins(std::span<const double> x, int bins);

/// Throws InvalidArgument when the series differ in length or are shorter than 3 * bins.
OrientationVerdict orient_pair(std::span<const double> u, std::span<const double> v, const EntropyConfig& config = {});

struct OrientedEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    double score = 0.0;
};

struct EntropyOrientationResult {
    std::vector<OrientedEdge> inserted;
    std::vector<OrientedEdge> rejected_cycle;
    std::vector<UndirectedEdge> inconclusive;
    std::vector<std::string> log;
};

/// Orients each pair, sorts conclusive verdicts by score (desc, then vertex
/// names) and returns the ones that keep the lag-0 sub-graph of `partial`
/// acyclic when inserted in that order. `partial` is not modified.
EntropyOrientationResult entropy_orientation(const std::vector<UndirectedEdge>& pairs, const CausalGraph& partial,
                                             const TimeSeriesDataset& dataset, const EntropyConfig& config = {});

}  // namespace radice
