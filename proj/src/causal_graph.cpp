#include "radice/causal_graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <sstream>

#include "radice/error.hpp"

namespace radice {

CausalGraph::CausalGraph(std::vector<std::string> vertices) : vertices_(std::move(vertices)) {
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (vertices_[i].empty()) throw InvalidArgument("graph: empty vertex name");
        if (!index_.emplace(vertices_[i], i).second) {
            throw InvalidArgument("graph: duplicate vertex '" + vertices_[i] + "'");
        }
    }
}

std::optional<std::size_t> CausalGraph::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t CausalGraph::require(const std::string& name) const {
    auto idx = index_of(name);
    if (!idx) throw InvalidArgument("graph: unknown vertex '" + name + "'");
    return *idx;
}

void CausalGraph::check_vertex(std::size_t v) const {
    if (v >= vertices_.size()) throw InvalidArgument("graph: vertex index out of range");
}

bool CausalGraph::try_add_directed(std::size_t from, std::size_t to, int lag) {
    check_vertex(from);
    check_vertex(to);
    if (lag < 0) throw InvalidArgument("graph: negative lag");
    if (lag == 0) {
        if (from == to) return false;
        if (has_undirected(from, to)) {
            throw InvalidArgument("graph: pair " + vertices_[from] + "-" + vertices_[to] + " is already undirected");
        }
        if (lag0_reachable(to, from)) return false;
    }
    directed_.insert(DirectedEdge{from, to, lag});
    return true;
}

void CausalGraph::add_directed(std::size_t from, std::size_t to, int lag) {
    if (!try_add_directed(from, to, lag)) {
        throw CycleError("graph: edge " + vertices_[from] + "->" + vertices_[to] +
                         " at lag 0 would create a contemporaneous cycle");
    }
}

void CausalGraph::add_directed(const std::string& from, const std::string& to, int lag) {
    add_directed(require(from), require(to), lag);
}

void CausalGraph::add_undirected(std::size_t u, std::size_t v) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw InvalidArgument("graph: undirected self loop");
    if (has_directed(u, v, 0) || has_directed(v, u, 0)) {
        throw InvalidArgument("graph: pair " + vertices_[u] + "-" + vertices_[v] + " already has a lag-0 direction");
    }
    undirected_.insert(UndirectedEdge(u, v));
}

void CausalGraph::add_undirected(const std::string& u, const std::string& v) { add_undirected(require(u), require(v)); }

bool CausalGraph::has_directed(std::size_t from, std::size_t to, int lag) const {
    return directed_.contains(DirectedEdge{from, to, lag});
}

bool CausalGraph::has_undirected(std::size_t u, std::size_t v) const {
    return u != v && undirected_.contains(UndirectedEdge(u, v));
}

bool CausalGraph::has_directed(const std::string& from, const std::string& to, int lag) const {
    const auto u = index_of(from);
    const auto v = index_of(to);
    return u && v && has_directed(*u, *v, lag);
}

bool CausalGraph::has_undirected(const std::string& u, const std::string& v) const {
    const auto a = index_of(u);
    const auto b = index_of(v);
    return a && b && has_undirected(*a, *b);
}

bool CausalGraph::lag0_reachable(std::size_t from, std::size_t to) const {
    if (from == to) return true;
    std::vector<std::vector<std::size_t>> adj(vertices_.size());
    for (const auto& e : directed_) {
        if (e.lag == 0) adj[e.from].push_back(e.to);
    }
    std::vector<char> seen(vertices_.size(), 0);
    std::vector<std::size_t> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : adj[v]) {
            if (w == to) return true;
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    return false;
}

bool CausalGraph::lag0_acyclic() const {
    for (const auto& e : directed_) {
        if (e.lag == 0 && e.from == e.to) return false;
    }
    return lag0_topological_order(*this).size() == vertices_.size();
}

std::vector<std::size_t> CausalGraph::successors(std::size_t v) const {
    check_vertex(v);
    std::vector<std::size_t> out;
    auto it = directed_.lower_bound(DirectedEdge{v, 0, 0});
    for (; it != directed_.end() && it->from == v; ++it) {
        if (it->to != v && (out.empty() || out.back() != it->to)) out.push_back(it->to);
    }
    std::sort(out.begin(), out.end(), [this](std::size_t a, std::size_t b) { return vertices_[a] < vertices_[b]; });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool CausalGraph::has_causal_path(std::size_t from, std::size_t to) const {
    check_vertex(from);
    check_vertex(to);
    std::vector<char> seen(vertices_.size(), 0);
    std::vector<std::size_t> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : successors(v)) {
            if (w == to) return true;
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    return false;
}

bool CausalGraph::has_causal_path(const std::string& from, const std::string& to) const {
    return has_causal_path(require(from), require(to));
}

PathEnumeration CausalGraph::enumerate_paths(std::size_t from, std::size_t to, std::size_t limit) const {
    check_vertex(from);
    check_vertex(to);
    PathEnumeration result;
    if (from == to) return result;

    std::vector<std::vector<std::size_t>> succ(vertices_.size());
    for (std::size_t v = 0; v < vertices_.size(); ++v) succ[v] = successors(v);

    // Prune vertices that cannot reach the target.
    std::vector<char> reaches(vertices_.size(), 0);
    {
        std::vector<std::vector<std::size_t>> pred(vertices_.size());
        for (std::size_t v = 0; v < vertices_.size(); ++v) {
            for (std::size_t w : succ[v]) pred[w].push_back(v);
        }
        std::vector<std::size_t> stack{to};
        reaches[to] = 1;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t p : pred[v]) {
                if (!reaches[p]) {
                    reaches[p] = 1;
                    stack.push_back(p);
                }
            }
        }
    }
    if (!reaches[from]) return result;

    std::vector<char> on_path(vertices_.size(), 0);
    Path path{from};
    on_path[from] = 1;
    std::function<bool(std::size_t)> dfs = [&](std::size_t v) -> bool {
        for (std::size_t w : succ[v]) {
            if (on_path[w] || !reaches[w]) continue;
            path.push_back(w);
            if (w == to) {
                if (result.paths.size() >= limit) {
                    result.truncated = true;
                    return false;
                }
                result.paths.push_back(path);
            } else {
                on_path[w] = 1;
                const bool keep_going = dfs(w);
                on_path[w] = 0;
                if (!keep_going) return false;
            }
            path.pop_back();
        }
        return true;
    };
    dfs(from);
    return result;
}

std::vector<std::size_t> lag0_topological_order(const CausalGraph& g) {
    const std::size_t n = g.num_vertices();
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& e : g.directed()) {
        if (e.lag == 0) {
            adj[e.from].push_back(e.to);
            ++indegree[e.to];
        }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t v = 0; v < n; ++v) {
        if (indegree[v] == 0) ready.push(v);
    }
    std::vector<std::size_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        const std::size_t v = ready.top();
        ready.pop();
        order.push_back(v);
        for (std::size_t w : adj[v]) {
            if (--indegree[w] == 0) ready.push(w);
        }
    }
    return order;
}

// Serialization -------------------------------------------------------------

nlohmann::json graph_to_json(const CausalGraph& g) {
    nlohmann::json directed = nlohmann::json::array();
    for (const auto& e : g.directed()) directed.push_back({g.name(e.from), g.name(e.to), e.lag});
    nlohmann::json undirected = nlohmann::json::array();
    for (const auto& e : g.undirected()) undirected.push_back({g.name(e.a), g.name(e.b)});
    return {{"vertices", g.vertices()}, {"directed", std::move(directed)}, {"undirected", std::move(undirected)}};
}

CausalGraph graph_from_json(const nlohmann::json& j) {
    try {
        CausalGraph g(j.at("vertices").get<std::vector<std::string>>());
        if (j.contains("directed")) {
            for (const auto& e : j.at("directed")) {
                if (!e.is_array() || e.size() != 3) throw ParseError("graph JSON: directed edge must be [from, to, lag]");
                g.add_directed(e[0].get<std::string>(), e[1].get<std::string>(), e[2].get<int>());
            }
        }
        if (j.contains("undirected")) {
            for (const auto& e : j.at("undirected")) {
                if (!e.is_array() || e.size() != 2) throw ParseError("graph JSON: undirected edge must be [u, v]");
                g.add_undirected(e[0].get<std::string>(), e[1].get<std::string>());
            }
        }
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("graph JSON: ") + e.what());
    }
}

namespace {

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

}  // namespace

std::string graph_to_dot(const CausalGraph& g, const DotStyle& style) {
    std::ostringstream out;
    out << "digraph G {\n  rankdir=LR;\n  node [shape=ellipse];\n";
    for (const auto& v : g.vertices()) {
        out << "  " << dot_quote(v);
        if (style.bold_nodes.contains(v)) {
            out << " [style=bold, penwidth=2]";
        } else if (style.solid_nodes.contains(v)) {
            out << " [style=solid]";
        } else if (style.dashed_nodes.contains(v)) {
            out << " [style=dashed]";
        }
        out << ";\n";
    }
    for (const auto& e : g.directed()) {
        out << "  " << dot_quote(g.name(e.from)) << " -> " << dot_quote(g.name(e.to)) << " [label=\"" << e.lag
            << "\"];\n";
    }
    for (const auto& e : g.undirected()) {
        out << "  " << dot_quote(g.name(e.a)) << " -> " << dot_quote(g.name(e.b)) << " [dir=none, label=\"0\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace radice
