#include <doctest.h>

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <random>
#include <set>

#include "radice/discovery.hpp"
#include "radice/error.hpp"
#include "radice/simulator.hpp"
#include "support.hpp"

using namespace radice;

namespace {

TimeSeriesDataset make_dataset(std::vector<Series> cols) {
    auto labels = testing::names(cols.size());
    return TimeSeriesDataset(std::move(labels), std::move(cols));
}

/// d-separation in a lag-0 DAG via the moralised ancestral graph.
class DSeparationOracle final : public IndependenceTest {
public:
    explicit DSeparationOracle(const CausalGraph& dag) : dag_(dag) {}

    CITestResult test(VarLag x, VarLag y, std::span<const VarLag> z) const override {
        ++calls;
        const std::size_t n = dag_.num_vertices();
        std::vector<std::set<std::size_t>> parents(n);
        for (const auto& e : dag_.directed()) parents[e.to].insert(e.from);
        std::vector<bool> keep(n, false), given(n, false);
        std::vector<std::size_t> stack{x.var, y.var};
        for (const auto& v : z) {
            stack.push_back(v.var);
            given[v.var] = true;
        }
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            if (keep[v]) continue;
            keep[v] = true;
            for (auto p : parents[v]) stack.push_back(p);
        }
        std::vector<std::set<std::size_t>> adj(n);
        for (std::size_t v = 0; v < n; ++v) {
            if (!keep[v]) continue;
            for (auto p : parents[v]) {
                adj[v].insert(p);
                adj[p].insert(v);
                for (auto q : parents[v]) {
                    if (p != q) adj[p].insert(q);
                }
            }
        }
        std::vector<bool> seen(n, false);
        stack = {x.var};
        bool connected = false;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            if (seen[v] || given[v]) continue;
            seen[v] = true;
            if (v == y.var) connected = true;
            for (auto w : adj[v]) stack.push_back(w);
        }
        CITestResult r;
        r.p_value = connected ? 0.0 : 1.0;
        r.statistic = connected ? 1.0 : 0.0;
        r.conditioning_set.assign(z.begin(), z.end());
        return r;
    }

    mutable std::size_t calls = 0;

private:
    CausalGraph dag_;
};

/// Hand-written answers: pairs listed in `dependent` are dependent under every
/// conditioning set, everything else is independent.
class TableOracle final : public IndependenceTest {
public:
    explicit TableOracle(std::set<std::pair<std::size_t, std::size_t>> dependent) : dep_(std::move(dependent)) {}

    CITestResult test(VarLag x, VarLag y, std::span<const VarLag>) const override {
        CITestResult r;
        const auto key = std::minmax(x.var, y.var);
        r.p_value = x.lag == 0 && y.lag == 0 && dep_.count({key.first, key.second}) ? 0.0 : 1.0;
        return r;
    }

private:
    std::set<std::pair<std::size_t, std::size_t>> dep_;
};

using Triple = std::tuple<std::size_t, std::size_t, std::size_t>;

std::set<Triple> v_structures(std::size_t n, const std::set<std::pair<std::size_t, std::size_t>>& arcs,
                              const std::set<std::pair<std::size_t, std::size_t>>& skeleton) {
    std::set<Triple> out;
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (arcs.count({a, c}) && arcs.count({b, c}) && !skeleton.count({a, b})) out.insert({a, c, b});
            }
        }
    }
    return out;
}

bool acyclic(std::size_t n, const std::set<std::pair<std::size_t, std::size_t>>& arcs) {
    std::vector<int> indeg(n, 0);
    for (const auto& [a, b] : arcs) ++indeg[b];
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push_back(v);
    std::size_t done = 0;
    while (!ready.empty()) {
        const auto v = ready.back();
        ready.pop_back();
        ++done;
        for (const auto& [a, b] : arcs)
            if (a == v && --indeg[b] == 0) ready.push_back(b);
    }
    return done == n;
}

/// Arcs oriented the same way in every DAG of the Markov equivalence class.
std::set<std::pair<std::size_t, std::size_t>> compelled_arcs(const CausalGraph& dag) {
    const std::size_t n = dag.num_vertices();
    std::set<std::pair<std::size_t, std::size_t>> skeleton, arcs;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& e : dag.directed()) {
        arcs.insert({e.from, e.to});
        skeleton.insert(std::minmax(e.from, e.to));
        edges.push_back(std::minmax(e.from, e.to));
    }
    const auto target = v_structures(n, arcs, skeleton);
    std::map<std::pair<std::size_t, std::size_t>, std::set<bool>> seen;
    for (std::uint32_t mask = 0; mask < (1u << edges.size()); ++mask) {
        std::set<std::pair<std::size_t, std::size_t>> member;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const auto [a, b] = edges[k];
            member.insert((mask >> k) & 1 ? std::pair{b, a} : std::pair{a, b});
        }
        if (!acyclic(n, member) || v_structures(n, member, skeleton) != target) continue;
        for (std::size_t k = 0; k < edges.size(); ++k) seen[edges[k]].insert((mask >> k) & 1);
    }
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (const auto& [e, dirs] : seen) {
        if (dirs.size() == 1) out.insert(*dirs.begin() ? std::pair{e.second, e.first} : e);
    }
    return out;
}

std::set<std::pair<std::size_t, std::size_t>> adjacency(const CausalGraph& g) {
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (const auto& e : g.directed())
        if (e.from != e.to) out.insert(std::minmax(e.from, e.to));
    for (const auto& e : g.undirected()) out.insert({e.a, e.b});
    return out;
}

}  // namespace

TEST_CASE("normal scores") {
    const std::vector<double> x{3.0, 1.0, 2.0, 2.0};
    const auto s = normal_scores(x);
    CHECK(s[1] < s[2]);
    CHECK(s[2] == doctest::Approx(s[3]));
    CHECK(s[2] < s[0]);
    CHECK(s[0] == doctest::Approx(-s[1]));
    CHECK(s[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("partial correlation against a closed form") {
    std::mt19937_64 rng(5);
    const auto x = testing::gaussian(300, rng);
    const auto e = testing::gaussian(300, rng);
    Series y(300);
    for (std::size_t i = 0; i < 300; ++i) y[i] = 0.3 * x[i] + e[i];
    const auto r = partial_correlation_test({x, y}, {0, 0}, {1, 0}, {});
    const double rho = pearson(x, y);
    CHECK(r.statistic == doctest::Approx(rho).epsilon(1e-9));
    const double t = rho * std::sqrt(298.0 / (1 - rho * rho));
    boost::math::students_t dist(298);
    CHECK(r.p_value == doctest::Approx(2 * boost::math::cdf(boost::math::complement(dist, std::abs(t)))).epsilon(1e-9));
}

TEST_CASE("ci_test is calibrated under independence") {
    int rejected = 0;
    for (int seed = 0; seed < 200; ++seed) {
        std::mt19937_64 rng(1000 + seed);
        const auto ds = make_dataset({testing::gaussian(2000, rng), testing::gaussian(2000, rng)});
        const auto r = ci_test(ds, {0, 0}, {1, 0}, {});
        CHECK(r.p_value >= 0.0);
        CHECK(r.p_value <= 1.0);
        if (r.p_value < 0.05) ++rejected;
    }
    MESSAGE("rejections " << rejected << "/200");
    CHECK(rejected >= 4);
    CHECK(rejected <= 18);
}

TEST_CASE("near-deterministic dependence") {
    std::mt19937_64 rng(2);
    const auto x = testing::gaussian(2000, rng);
    auto y = testing::gaussian(2000, rng);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] + 0.01 * y[i];
    CHECK(ci_test(make_dataset({x, y}), {0, 0}, {1, 0}, {}).p_value < 1e-6);
}

TEST_CASE("chain is separated by its middle vertex") {
    int separated = 0;
    for (int seed = 0; seed < 200; ++seed) {
        std::mt19937_64 rng(5000 + seed);
        const auto x = testing::gaussian(2000, rng);
        auto z = testing::gaussian(2000, rng);
        auto y = testing::gaussian(2000, rng);
        for (std::size_t i = 0; i < z.size(); ++i) {
            z[i] += 0.8 * x[i];
            y[i] += 0.8 * z[i];
        }
        const auto ds = make_dataset({x, y, z});
        const VarLag cond[] = {{2, 0}};
        CHECK(ci_test(ds, {0, 0}, {1, 0}, {}).p_value < 1e-6);
        if (ci_test(ds, {0, 0}, {1, 0}, cond).p_value > 0.05) ++separated;
    }
    CHECK(separated >= 160);
}

TEST_CASE("ci_test errors") {
    std::mt19937_64 rng(1);
    const auto ds = make_dataset({testing::gaussian(4, rng), testing::gaussian(4, rng)});
    const VarLag cond[] = {{1, 1}};
    CHECK_THROWS_AS(ci_test(ds, {0, 0}, {1, 0}, cond), InvalidArgument);
    CHECK_THROWS_AS(ci_test(ds, {0, 0}, {5, 0}, {}), InvalidArgument);
    CHECK_THROWS_AS(ci_test(ds, {0, -1}, {1, 0}, {}), InvalidArgument);
}

TEST_CASE("collinear conditioning set is flagged") {
    std::mt19937_64 rng(3);
    const auto x = testing::gaussian(200, rng);
    const auto y = testing::gaussian(200, rng);
    const auto z = testing::gaussian(200, rng);
    const VarLag cond[] = {{2, 0}, {3, 0}};
    const auto r = partial_correlation_test({x, y, z, z}, {0, 0}, {1, 0}, cond);
    CHECK(r.singular);
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
}

TEST_CASE("config validation") {
    DiscoveryConfig c;
    CHECK_NOTHROW(c.validate());
    c.tau_max = -1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.alpha_grid = {0.05, 1.0};
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.fixed_alpha = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.ci_test = "gpdc";
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("collider and lone dependence with hand-built answers") {
    // a=0, b=1, c=2: a - b - c with a and c independent
    const TableOracle collider({{0, 1}, {1, 2}});
    const auto sk = discover_skeleton(3, collider, 0, 0.05);
    const auto g = orient_skeleton(sk, {"a", "b", "c"});
    CHECK(g.has_directed(0, 1, 0));
    CHECK(g.has_directed(2, 1, 0));
    CHECK(g.undirected().empty());

    const TableOracle pair(std::set<std::pair<std::size_t, std::size_t>>{{0, 1}});
    const auto g2 = orient_skeleton(discover_skeleton(2, pair, 0, 0.05), {"a", "b"});
    CHECK(g2.has_undirected(0, 1));
    CHECK(g2.directed().empty());
}

TEST_CASE("perfect independence answers recover the equivalence class") {
    std::mt19937_64 rng(77);
    int directed = 0, undirected = 0;
    for (int rep = 0; rep < 150; ++rep) {
        const std::size_t n = 3 + rep % 4;
        const auto dag = testing::random_dag(n, 0.5, 0.0, rng);
        const DSeparationOracle oracle(dag);
        const auto sk = discover_skeleton(n, oracle, 0, 0.05, static_cast<int>(n), 1000);
        const auto g = orient_skeleton(sk, dag.vertices());
        CHECK(adjacency(g) == adjacency(dag));
        std::set<std::pair<std::size_t, std::size_t>> arcs;
        for (const auto& e : g.directed()) arcs.insert({e.from, e.to});
        CHECK(arcs == compelled_arcs(dag));
        CHECK(g.lag0_acyclic());
        directed += static_cast<int>(arcs.size());
        undirected += static_cast<int>(g.undirected().size());
    }
    MESSAGE(directed << " compelled arcs, " << undirected << " reversible edges");
    CHECK(directed > 0);
    CHECK(undirected > 0);
}

TEST_CASE("independent noise yields an empty graph") {
    int empty = 0;
    DiscoveryConfig config;
    config.fixed_alpha = 0.01;
    for (int seed = 0; seed < 40; ++seed) {
        std::mt19937_64 rng(900 + seed);
        const auto ds = make_dataset(
            {testing::gaussian(2000, rng), testing::gaussian(2000, rng), testing::gaussian(2000, rng)});
        const auto r = discover(ds, config);
        if (r.graph.directed().empty() && r.graph.undirected().empty()) ++empty;
        CHECK(r.alpha == 0.01);
    }
    CHECK(empty >= 34);
}

TEST_CASE("planted lag-1 edge") {
    int recovered = 0;
    DiscoveryConfig config;
    config.fixed_alpha = 0.01;
    for (int seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(300 + seed);
        const auto a = testing::gaussian(2000, rng);
        auto b = testing::gaussian(2000, rng);
        for (std::size_t t = 1; t < b.size(); ++t) b[t] += 0.8 * a[t - 1];
        const auto r = discover(make_dataset({a, b}), config);
        if (r.graph.has_directed(0, 1, 1) && !r.graph.has_directed(1, 0, 1) && !r.graph.has_directed(1, 0, 0) &&
            !r.graph.has_directed(0, 1, 0) && !r.graph.has_undirected(0, 1))
            ++recovered;
    }
    CHECK(recovered >= 19);
}

TEST_CASE("output contract on simulated graphs") {
    const auto truth = load_ground_truth(testing::fixture("graphs/n10.json"));
    for (int tau : {0, 1, 2}) {
        const auto ds = generate(randomize_weights(truth, 4), 120, 11);
        DiscoveryConfig config;
        config.tau_max = tau;
        const auto r = discover(ds, config);
        for (const auto& e : r.graph.directed()) {
            CHECK(e.lag <= tau);
            CHECK(e.lag >= 0);
            CHECK(e.from != e.to);
        }
        CHECK(r.graph.lag0_acyclic());
        CHECK(std::find(config.alpha_grid.begin(), config.alpha_grid.end(), r.alpha) != config.alpha_grid.end());
        for (const auto& u : r.graph.undirected()) {
            CHECK_FALSE(r.graph.has_directed(u.a, u.b, 0));
            CHECK_FALSE(r.graph.has_directed(u.b, u.a, 0));
        }
        const auto again = discover(ds, config);
        CHECK(graph_to_json(again.graph) == graph_to_json(r.graph));
        CHECK(again.alpha == r.alpha);
        CHECK(again.bic == r.bic);
    }
}

TEST_CASE("low-sample warning and too-short input") {
    std::mt19937_64 rng(8);
    const auto ds = make_dataset({testing::gaussian(12, rng), testing::gaussian(12, rng)});
    CHECK(discover(ds).low_sample_warning);
    const auto tiny = make_dataset({testing::gaussian(3, rng), testing::gaussian(3, rng)});
    CHECK_THROWS_AS(discover(tiny), InvalidArgument);
    std::mt19937_64 rng2(9);
    const auto ok = make_dataset({testing::gaussian(200, rng2), testing::gaussian(200, rng2)});
    CHECK_FALSE(discover(ok).low_sample_warning);
}

TEST_CASE("skeleton beats correlation thresholding") {
    for (const std::string name : {"n5", "n10", "n15", "n25"}) {
        const auto truth = load_ground_truth(testing::fixture("graphs/" + name + ".json"));
        const auto ds = generate(randomize_weights(truth, 21), 500, 22);
        const std::size_t n = ds.num_metrics();
        const auto expected = adjacency(truth.graph);
        DiscoveryConfig config;
        config.fixed_alpha = 0.05;
        const auto found = adjacency(discover(ds, config).graph);

        std::set<std::pair<std::size_t, std::size_t>> baseline;
        boost::math::students_t dist(497);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const auto& x = ds.series(i);
                const auto& y = ds.series(j);
                double best = std::abs(pearson(x, y));
                for (const auto& [a, b] : {std::pair{&x, &y}, std::pair{&y, &x}}) {
                    const std::span<const double> later(a->data() + 1, a->size() - 1);
                    const std::span<const double> earlier(b->data(), b->size() - 1);
                    best = std::max(best, std::abs(pearson(later, earlier)));
                }
                const double t = best * std::sqrt(497.0 / (1 - best * best));
                if (2 * boost::math::cdf(boost::math::complement(dist, t)) < 0.05) baseline.insert({i, j});
            }
        }
        auto f1 = [&](const std::set<std::pair<std::size_t, std::size_t>>& got) {
            std::size_t tp = 0;
            for (const auto& e : got) tp += expected.count(e);
            return got.empty() ? 0.0 : 2.0 * double(tp) / double(got.size() + expected.size());
        };
        MESSAGE(name << " discovery F1 " << f1(found) << " baseline F1 " << f1(baseline));
        CHECK(f1(found) >= f1(baseline));
    }
}
