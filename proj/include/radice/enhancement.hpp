#pragma once

#include <string>
#include <vector>

#include "radice/causal_graph.hpp"
#include "radice/dataset.hpp"
#include "radice/domain_knowledge.hpp"
#include "radice/entropy_orientation.hpp"

namespace radice {

struct EnhancementResult {
    CausalGraph graph;
    /// Conflicts and discarded relations, in processing order.
    std::vector<std::string> log;
};

/// Builds the causal graph with domain knowledge from a discovered graph:
///  1. every domain edge is added at lag 0;
///  2. discovered directed edges are kept iff level(from) <= level(to);
///  3. undirected pairs with distinct levels are oriented low -> high;
///  4. level-equal undirected pairs go through entropy orientation.
/// A discovered or level-oriented lag-0 edge that would close a cycle with
/// edges already placed is dropped and logged. The result has no undirected
/// edges and an acyclic lag-0 sub-graph.
EnhancementResult enhance(const CausalGraph& discovered, const PartialGraphKnowledge& knowledge,
                          const TimeSeriesDataset& dataset, const EntropyConfig& entropy = {});

}  // namespace radice
