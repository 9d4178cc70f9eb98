#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "radice/dataset.hpp"
#include "radice/domain_knowledge.hpp"

namespace radice {

struct RefinementConfig {
    std::size_t max_shift = 1;
    std::size_t max_width = 2;
    double shift_penalty = 0.004;
    double smooth_penalty = 0.01;
    double min_sim = 0.5;

    void validate() const;
    /// max_shift = 0, max_width = 1: plain |Pearson| scoring.
    static RefinementConfig pearson_only(double min_sim = 0.5);
};

/// Best cell of the smoothing x shift grid.
struct AdjustedScore {
    double score = 0.0;  ///< |corr| - penalty
    double corr = 0.0;
    double penalty = 0.0;
    std::size_t width = 1;
    std::size_t shift = 0;

    friend bool operator==(const AdjustedScore&, const AdjustedScore&) = default;
};

/// Normalises both series, then for every width w in [1, max_width] smooths
/// both and for every shift s in [0, max_shift] correlates x[t] with c[t - s].
/// Returns the maximum score; ties go to the smaller penalty, then smaller (w, s).
AdjustedScore adjusted_score(std::span<const double> x, std::span<const double> c, const RefinementConfig& config = {});

struct ScoredCandidate {
    std::string metric;
    AdjustedScore score;
};

struct RefinementResult {
    /// Candidate root causes, ordered by metric name.
    std::vector<ScoredCandidate> root_causes;
    std::vector<ScoredCandidate> below_min_sim;
    std::vector<ScoredCandidate> sign_rule;
};

RefinementResult refine(const DiagnosticInput& input, const DomainKnowledgeModel& dk, const RefinementConfig& config = {});

}  // namespace radice
