#include "radice/enhancement.hpp"

#include "radice/error.hpp"

namespace radice {

EnhancementResult enhance(const CausalGraph& discovered, const PartialGraphKnowledge& knowledge,
                          const TimeSeriesDataset& dataset, const EntropyConfig& entropy) {
    EnhancementResult result{CausalGraph(discovered.vertices()), {}};
    CausalGraph& out = result.graph;
    auto level = [&](std::size_t v) { return knowledge.level_of(discovered.name(v)); };
    auto edge_name = [&](std::size_t u, std::size_t v, int lag) {
        return discovered.name(u) + "->" + discovered.name(v) + " (lag " + std::to_string(lag) + ")";
    };

    for (const auto& [u, v] : knowledge.domain_edges) {
        const auto ui = out.index_of(u);
        const auto vi = out.index_of(v);
        if (!ui || !vi) throw InvalidArgument("enhance: domain edge " + u + "->" + v + " references an unknown metric");
        if (!out.try_add_directed(*ui, *vi, 0)) {
            throw CycleError("enhance: domain edges " + u + "->" + v + " close a contemporaneous cycle");
        }
    }

    for (const auto& e : discovered.directed()) {
        if (level(e.from) > level(e.to)) {
            result.log.push_back("dropped " + edge_name(e.from, e.to, e.lag) + ": contradicts levels");
            continue;
        }
        if (e.lag == 0 && !out.try_add_directed(e.from, e.to, 0)) {
            result.log.push_back("dropped " + edge_name(e.from, e.to, 0) + ": conflicts with domain edges");
            continue;
        }
        if (e.lag > 0) out.add_directed(e.from, e.to, e.lag);
    }

    std::vector<UndirectedEdge> level_equal;
    for (const auto& e : discovered.undirected()) {
        if (out.has_directed(e.a, e.b, 0) || out.has_directed(e.b, e.a, 0)) continue;
        const int la = level(e.a);
        const int lb = level(e.b);
        if (la == lb) {
            level_equal.push_back(e);
            continue;
        }
        const std::size_t from = la < lb ? e.a : e.b;
        const std::size_t to = la < lb ? e.b : e.a;
        if (!out.try_add_directed(from, to, 0)) {
            result.log.push_back("dropped " + edge_name(from, to, 0) + ": level orientation would create a cycle");
        }
    }

    auto oriented = entropy_orientation(level_equal, out, dataset, entropy);
    for (const auto& e : oriented.inserted) out.add_directed(e.from, e.to, 0);
    for (auto& line : oriented.log) result.log.push_back(std::move(line));
    for (const auto& e : oriented.inconclusive) {
        result.log.push_back("dropped " + discovered.name(e.a) + " - " + discovered.name(e.b) +
                             ": entropy orientation inconclusive");
    }
    return result;
}

}  // namespace radice
