#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "radice/anomaly_window.hpp"
#include "radice/causal_graph.hpp"
#include "radice/domain_knowledge.hpp"
#include "radice/refinement.hpp"

namespace radice {

struct RootCauseReport {
    std::string target;
    /// Final root causes in processing order.
    std::vector<ScoredCandidate> root_causes;
    /// Root-cause causal sub-graph; its vertices are the retained metrics only.
    CausalGraph sub_graph;
    /// Sub-graph metrics that are neither the target nor a root cause.
    std::vector<std::string> intermediates;
    std::optional<AnomalyWindow> window;

    std::vector<ScoredCandidate> below_min_sim;
    std::vector<ScoredCandidate> sign_rule;
    std::vector<ScoredCandidate> no_causal_path;

    std::vector<std::string> warnings;
};

/// Sorted by level (desc), score (desc), metric name (asc).
std::vector<ScoredCandidate> order_candidates(std::vector<ScoredCandidate> candidates,
                                              const PartialGraphKnowledge& knowledge);

struct PathSelection {
    std::optional<Path> path;
    bool truncated = false;
};

/// Among simple directed paths from -> target keeps the one visiting the most
/// members of `rc_set` (endpoints included), then the fewest hops, then the
/// lexicographically smallest vertex-name sequence.
PathSelection select_path(const CausalGraph& g, std::size_t from, std::size_t target, const std::set<std::size_t>& rc_set,
                          std::size_t limit = kDefaultPathLimit);

/// Trims the enhanced graph to the union of selected candidate-to-target
/// paths, drops candidates without a path, then (if `closure`) adds every
/// edge of `g_dw` whose endpoints are both retained.
RootCauseReport subtract(const CausalGraph& g_dw, const std::vector<ScoredCandidate>& candidates,
                         const std::string& target, const PartialGraphKnowledge& knowledge, bool closure = true,
                         std::size_t path_limit = kDefaultPathLimit);

}  // namespace radice
