#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace radice {

/// Directed causal relation "from causes to after `lag` steps".
struct DirectedEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    int lag = 0;

    friend auto operator<=>(const DirectedEdge&, const DirectedEdge&) = default;
};

/// Unordered contemporaneous adjacency; stored with a < b.
struct UndirectedEdge {
    std::size_t a = 0;
    std::size_t b = 0;

    UndirectedEdge() = default;
    UndirectedEdge(std::size_t u, std::size_t v) : a(std::min(u, v)), b(std::max(u, v)) {}

    friend auto operator<=>(const UndirectedEdge&, const UndirectedEdge&) = default;
};

using Path = std::vector<std::size_t>;

struct PathEnumeration {
    std::vector<Path> paths;
    bool truncated = false;
};

inline constexpr std::size_t kDefaultPathLimit = 10'000;

/// Lagged causal graph over named metrics.
///
/// Invariants, enforced by every mutator: directed lag-0 edges form a DAG, no
/// lag-0 self loops, an unordered pair is either undirected or carries lag-0
/// directed edges (never both), and every endpoint is a vertex.
class CausalGraph {
public:
    CausalGraph() = default;
    explicit CausalGraph(std::vector<std::string> vertices);

    const std::vector<std::string>& vertices() const noexcept { return vertices_; }
    std::size_t num_vertices() const noexcept { return vertices_.size(); }
    std::optional<std::size_t> index_of(const std::string& name) const;
    /// Throws InvalidArgument for unknown names.
    std::size_t require(const std::string& name) const;
    const std::string& name(std::size_t v) const { return vertices_.at(v); }

    const std::set<DirectedEdge>& directed() const noexcept { return directed_; }
    const std::set<UndirectedEdge>& undirected() const noexcept { return undirected_; }

    /// Throws CycleError when a lag-0 edge would close a contemporaneous cycle
    /// (or is a self loop), InvalidArgument for bad endpoints, negative lags, or
    /// a pair already linked by an undirected edge.
    void add_directed(std::size_t from, std::size_t to, int lag);
    void add_directed(const std::string& from, const std::string& to, int lag);
    /// Non-throwing variant for cycle conflicts; returns false if the edge was rejected.
    bool try_add_directed(std::size_t from, std::size_t to, int lag);

    void add_undirected(std::size_t u, std::size_t v);
    void add_undirected(const std::string& u, const std::string& v);

    bool has_directed(std::size_t from, std::size_t to, int lag) const;
    bool has_undirected(std::size_t u, std::size_t v) const;
    /// False for unknown names.
    bool has_directed(const std::string& from, const std::string& to, int lag) const;
    bool has_undirected(const std::string& u, const std::string& v) const;
    void remove_directed(const DirectedEdge& e) { directed_.erase(e); }
    void remove_undirected(std::size_t u, std::size_t v) { undirected_.erase(UndirectedEdge(u, v)); }

    /// True iff a directed lag-0 path leads from `from` to `to` (or from == to).
    bool lag0_reachable(std::size_t from, std::size_t to) const;
    bool lag0_acyclic() const;

    /// Distinct successors over directed edges of any lag, sorted by vertex name.
    std::vector<std::size_t> successors(std::size_t v) const;

    /// Directed path of any lags; undirected edges do not carry causation.
    bool has_causal_path(std::size_t from, std::size_t to) const;
    bool has_causal_path(const std::string& from, const std::string& to) const;

    /// All vertex-simple directed paths, lexicographic by vertex-name sequence,
    /// stopping (and flagging truncation) after `limit` paths.
    PathEnumeration enumerate_paths(std::size_t from, std::size_t to, std::size_t limit = kDefaultPathLimit) const;

    friend bool operator==(const CausalGraph&, const CausalGraph&) = default;

private:
    void check_vertex(std::size_t v) const;

    std::vector<std::string> vertices_;
    std::map<std::string, std::size_t> index_;
    std::set<DirectedEdge> directed_;
    std::set<UndirectedEdge> undirected_;
};

/// `{"vertices":[...], "directed":[["u","v",lag],...], "undirected":[["u","v"],...]}`
nlohmann::json graph_to_json(const CausalGraph& g);
CausalGraph graph_from_json(const nlohmann::json& j);

struct DotStyle {
    std::set<std::string> solid_nodes;   ///< e.g. root causes
    std::set<std::string> dashed_nodes;  ///< e.g. intermediate metrics
    std::set<std::string> bold_nodes;    ///< e.g. the performance metric
};

/// Graphviz export; undirected edges use dir=none, lags become edge labels.
std::string graph_to_dot(const CausalGraph& g, const DotStyle& style = {});

/// Vertices in a topological order of the lag-0 sub-graph (ties by index).
std::vector<std::size_t> lag0_topological_order(const CausalGraph& g);

}  // namespace radice
