#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <span>
#include <string>
#include <vector>

#include "radice/causal_graph.hpp"
#include "radice/dataset.hpp"

namespace radice {

/// Variable X_var at time t - lag.
struct VarLag {
    std::size_t var = 0;
    int lag = 0;

    friend auto operator<=>(const VarLag&, const VarLag&) = default;
};

struct CITestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::vector<VarLag> conditioning_set;
    /// The residualising regression was rank deficient and solved by pseudo-inverse.
    bool singular = false;
};

/// Conditional independence test X ⟂ Y | Z on lag-aligned samples.
class IndependenceTest {
public:
    virtual ~IndependenceTest() = default;
    virtual CITestResult test(VarLag x, VarLag y, std::span<const VarLag> z) const = 0;
};

/// Partial correlation on normal-score (rank-transformed) series with a
/// Student-t p-value. Results are memoised; not safe for concurrent use.
class RobustParCorr final : public IndependenceTest {
public:
    explicit RobustParCorr(const TimeSeriesDataset& dataset);

    CITestResult test(VarLag x, VarLag y, std::span<const VarLag> z) const override;

    const std::vector<Series>& transformed() const noexcept { return scores_; }
    std::size_t tests_run() const noexcept { return tests_run_; }

private:
    std::vector<Series> scores_;
    mutable std::map<std::vector<int>, CITestResult> cache_;
    mutable std::size_t tests_run_ = 0;
};

/// Inverse-normal transform of average ranks, (rank) / (n + 1).
Series normal_scores(std::span<const double> x);

/// Partial correlation test on raw series; effective sample is T - max lag.
/// Throws InvalidArgument when fewer than |Z| + 3 aligned samples remain.
CITestResult partial_correlation_test(const std::vector<Series>& data, VarLag x, VarLag y, std::span<const VarLag> z);

/// RobustParCorr on `dataset` without memoisation.
CITestResult ci_test(const TimeSeriesDataset& dataset, VarLag x, VarLag y, std::span<const VarLag> z);

struct DiscoveryConfig {
    int tau_max = 1;
    std::vector<double> alpha_grid{0.01, 0.02, 0.05, 0.1, 0.2};
    /// Bypasses BIC selection when set.
    std::optional<double> fixed_alpha;
    std::string ci_test = "robust_parcorr";
    /// Cap on the contemporaneous conditioning-subset size.
    int max_conds = 3;
    /// Cap on conditioning subsets tried per link and subset size.
    int max_combinations = 100;
    /// Report X_i(t-k) -> X_i(t) autodependencies as lagged self loops.
    bool include_self_lags = false;

    void validate() const;
};

/// Links surviving the skeleton phases, before orientation.
struct Skeleton {
    std::size_t num_vars = 0;
    int tau_max = 0;
    /// parents[j] = lagged parents (lag >= 1) of X_j.
    std::vector<std::set<VarLag>> lagged_parents;
    /// Contemporaneous adjacencies, stored i < j.
    std::set<std::pair<std::size_t, std::size_t>> contemporaneous;
    /// Contemporaneous part of the separating set of (source, target) pairs
    /// removed during the skeleton phase. Pairs absent here have an empty set.
    std::map<std::pair<VarLag, std::size_t>, std::vector<std::size_t>> sepsets;
};

/// Stage 1 + stage 2: lagged-parent screening then contemporaneous skeleton.
Skeleton discover_skeleton(std::size_t num_vars, const IndependenceTest& test, int tau_max, double alpha,
                           int max_conds = 3, int max_combinations = 100);

/// Stage 3: colliders then Meek rules 1-3; conflicting or cycle-closing
/// orientations stay undirected.
CausalGraph orient_skeleton(const Skeleton& skeleton, const std::vector<std::string>& names,
                            bool include_self_lags = false);

struct DiscoveryResult {
    CausalGraph graph;
    double alpha = 0.0;
    /// Sum over variables of the OLS BIC on discovered parents.
    double bic = 0.0;
    bool low_sample_warning = false;
    std::size_t tests_run = 0;
};

/// Sum over variables of the OLS BIC of X_j(t) regressed on its lagged
/// parents from `skeleton` plus its lag-0 parents and undirected neighbours in `g`.
double graph_bic(const CausalGraph& g, const Skeleton& skeleton, const std::vector<Series>& data);

/// PCMCI+-style discovery with alpha chosen from the grid by minimum BIC
/// (ties go to the smaller alpha).
DiscoveryResult discover(const TimeSeriesDataset& dataset, const DiscoveryConfig& config = {});
inline DiscoveryResult discover(const DiagnosticInput& input, const DiscoveryConfig& config = {}) {
    return discover(input.dataset, config);
}

}  // namespace radice
