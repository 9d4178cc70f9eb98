#include "radice/subtraction.hpp"

#include <algorithm>

#include "radice/error.hpp"

namespace radice {

std::vector<ScoredCandidate> order_candidates(std::vector<ScoredCandidate> candidates,
                                              const PartialGraphKnowledge& knowledge) {
    std::sort(candidates.begin(), candidates.end(), [&](const ScoredCandidate& a, const ScoredCandidate& b) {
        const int la = knowledge.level_of(a.metric);
        const int lb = knowledge.level_of(b.metric);
        if (la != lb) return la > lb;
        if (a.score.score != b.score.score) return a.score.score > b.score.score;
        return a.metric < b.metric;
    });
    return candidates;
}

PathSelection select_path(const CausalGraph& g, std::size_t from, std::size_t target, const std::set<std::size_t>& rc_set,
                          std::size_t limit) {
    if (from == target) throw InvalidArgument("select_path: candidate equals target");
    const auto found = g.enumerate_paths(from, target, limit);
    PathSelection sel;
    sel.truncated = found.truncated;
    std::size_t best_members = 0;
    for (const auto& path : found.paths) {
        const auto members = static_cast<std::size_t>(
            std::count_if(path.begin(), path.end(), [&](std::size_t v) { return rc_set.contains(v); }));
        // Paths arrive in lexicographic order, so strict comparisons keep the smallest on ties.
        if (!sel.path || members > best_members || (members == best_members && path.size() < sel.path->size())) {
            sel.path = path;
            best_members = members;
        }
    }
    return sel;
}

RootCauseReport subtract(const CausalGraph& g_dw, const std::vector<ScoredCandidate>& candidates,
                         const std::string& target, const PartialGraphKnowledge& knowledge, bool closure,
                         std::size_t path_limit) {
    const std::size_t t = g_dw.require(target);
    RootCauseReport report;
    report.target = target;

    std::set<std::size_t> rc_set;
    for (const auto& c : candidates) {
        if (c.metric == target) throw InvalidArgument("subtract: target listed as a candidate");
        rc_set.insert(g_dw.require(c.metric));
    }

    std::set<std::size_t> kept_vertices{t};
    std::set<DirectedEdge> kept_edges;
    for (const auto& c : order_candidates(candidates, knowledge)) {
        const std::size_t r = g_dw.require(c.metric);
        const auto sel = select_path(g_dw, r, t, rc_set, path_limit);
        if (sel.truncated) {
            report.warnings.push_back("path enumeration from " + c.metric + " truncated at " +
                                      std::to_string(path_limit) + " paths");
        }
        if (!sel.path) {
            report.no_causal_path.push_back(c);
            continue;
        }
        report.root_causes.push_back(c);
        const Path& path = *sel.path;
        for (std::size_t k = 0; k < path.size(); ++k) {
            kept_vertices.insert(path[k]);
            if (k + 1 == path.size()) break;
            for (auto it = g_dw.directed().lower_bound(DirectedEdge{path[k], path[k + 1], 0});
                 it != g_dw.directed().end() && it->from == path[k] && it->to == path[k + 1]; ++it) {
                kept_edges.insert(*it);
            }
        }
    }
    if (closure) {
        for (const auto& e : g_dw.directed()) {
            if (kept_vertices.contains(e.from) && kept_vertices.contains(e.to)) kept_edges.insert(e);
        }
    }

    std::vector<std::string> names;
    for (std::size_t v : kept_vertices) names.push_back(g_dw.name(v));
    CausalGraph sub(names);
    for (const auto& e : kept_edges) sub.add_directed(g_dw.name(e.from), g_dw.name(e.to), e.lag);
    report.sub_graph = std::move(sub);

    std::set<std::string> rc_names;
    for (const auto& c : report.root_causes) rc_names.insert(c.metric);
    for (const auto& n : report.sub_graph.vertices()) {
        if (n != target && !rc_names.contains(n)) report.intermediates.push_back(n);
    }
    return report;
}

}  // namespace radice
