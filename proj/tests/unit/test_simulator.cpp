#include <doctest.h>

#include <cmath>
#include <set>

#include "radice/error.hpp"
#include "radice/simulator.hpp"
#include "support.hpp"

using namespace radice;

namespace {

GroundTruthGraph lagged_pair(double w) {
    GroundTruthGraph g;
    g.graph = CausalGraph({"a", "b"});
    g.graph.add_directed("a", "b", 1);
    g.weights[{0, 1, 1}] = w;
    g.performance = "b";
    g.eligible_roots = {"a"};
    return g;
}

double window_mean(std::span<const double> x, std::size_t from, std::size_t to) {
    double s = 0;
    for (std::size_t t = from; t < to; ++t) s += x[t];
    return s / double(to - from);
}

}  // namespace

TEST_CASE("fixtures validate") {
    for (const std::string name : {"n5", "n10", "n15", "n25"}) {
        const auto g = load_ground_truth(testing::fixture("graphs/" + name + ".json"));
        CHECK_NOTHROW(g.validate());
        CHECK(g.graph.lag0_acyclic());
        CHECK(g.graph.num_vertices() == std::stoul(name.substr(1)));
        CHECK_FALSE(g.eligible_roots.empty());
        const auto back = ground_truth_from_json(ground_truth_to_json(g));
        CHECK(ground_truth_to_json(back) == ground_truth_to_json(g));
    }
}

TEST_CASE("ground truth validation errors") {
    auto g = lagged_pair(0.5);
    g.eligible_roots = {"b"};
    CHECK_THROWS_AS(g.validate(), InvalidArgument);
    g = lagged_pair(0.5);
    g.weights.clear();
    CHECK_THROWS_AS(g.validate(), InvalidArgument);
    g = lagged_pair(std::nan(""));
    CHECK_THROWS_AS(g.validate(), InvalidArgument);
    g = lagged_pair(0.5);
    g.performance = "zzz";
    CHECK_THROWS(g.validate());
    CHECK_THROWS_AS(ground_truth_from_json(nlohmann::json{{"vertices", {"a"}}}), ParseError);
}

TEST_CASE("weight randomisation") {
    const auto base = load_ground_truth(testing::fixture("graphs/n25.json"));
    std::vector<double> draws;
    for (std::uint64_t seed = 0; draws.size() < 10000; ++seed) {
        const auto w = randomize_weights(base, seed);
        CHECK(graph_to_json(w.graph) == graph_to_json(base.graph));
        for (const auto& [e, v] : w.weights) draws.push_back(v);
    }
    double sum = 0;
    for (double v : draws) sum += v;
    const double m = sum / double(draws.size());
    CHECK(m >= 0.49);
    CHECK(m <= 0.51);
    CHECK(*std::min_element(draws.begin(), draws.end()) >= 0.1);
    CHECK(*std::max_element(draws.begin(), draws.end()) <= 0.9);
    CHECK(ground_truth_to_json(randomize_weights(base, 5)) == ground_truth_to_json(randomize_weights(base, 5)));
    CHECK(ground_truth_to_json(randomize_weights(base, 5)) != ground_truth_to_json(randomize_weights(base, 6)));

    GroundTruthGraph empty;
    empty.graph = CausalGraph({"a"});
    empty.performance = "a";
    CHECK(ground_truth_to_json(randomize_weights(empty, 1)) == ground_truth_to_json(empty));
}

TEST_CASE("derived seeds are distinct streams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 50; ++s)
        for (std::uint64_t k = 0; k < 4; ++k) seen.insert(derive_seed(s, k));
    CHECK(seen.size() == 200);
    CHECK(derive_seed(7, 2) == derive_seed(7, 2));
}

TEST_CASE("isolated vertex is unit noise") {
    GroundTruthGraph g;
    g.graph = CausalGraph({"a"});
    g.performance = "a";
    const auto ds = generate(g, 1000, 3);
    CHECK(ds.length() == 1000);
    const double sd = stddev(ds.series("a"));
    CHECK(sd >= 0.85);
    CHECK(sd <= 1.15);
}

TEST_CASE("lagged coefficient is recoverable") {
    const auto ds = generate(lagged_pair(0.8), 5000, 4);
    const auto a = ds.series("a");
    const auto b = ds.series("b");
    double sab = 0, saa = 0, ma = 0, mb = 0;
    const std::size_t n = a.size() - 1;
    for (std::size_t t = 1; t <= n; ++t) {
        ma += a[t - 1];
        mb += b[t];
    }
    ma /= double(n);
    mb /= double(n);
    for (std::size_t t = 1; t <= n; ++t) {
        sab += (a[t - 1] - ma) * (b[t] - mb);
        saa += (a[t - 1] - ma) * (a[t - 1] - ma);
    }
    CHECK(sab / saa == doctest::Approx(0.8).epsilon(0.05 / 0.8));
}

TEST_CASE("structural equations hold sample by sample") {
    const auto g = randomize_weights(load_ground_truth(testing::fixture("graphs/n10.json")), 9);
    const std::size_t burn = 50, len = 99;
    const auto noise = draw_noise(g.graph.num_vertices(), len + burn, 17);
    const auto values = run_scm(g, noise);
    for (std::size_t v = 0; v < g.graph.num_vertices(); ++v) {
        for (std::size_t t = 1; t < len + burn; ++t) {
            double expect = noise[v][t];
            for (const auto& [e, w] : g.weights)
                if (e.to == v) expect += w * values[e.from][t - static_cast<std::size_t>(e.lag)];
            CHECK(values[v][t] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    const auto ds = generate(g, len, 17, burn);
    CHECK(ds.series(0)[0] == values[0][burn]);
}

TEST_CASE("unstable systems are rejected") {
    GroundTruthGraph g;
    g.graph = CausalGraph({"a"});
    g.graph.add_directed("a", "a", 1);
    g.weights[{0, 0, 1}] = 1.5;
    g.performance = "a";
    CHECK_THROWS_AS(generate(g, 99, 1), InvalidArgument);
}

TEST_CASE("determinism") {
    const auto g = load_ground_truth(testing::fixture("graphs/n15.json"));
    const auto a = simulate_run(g, 42);
    const auto b = simulate_run(g, 42);
    CHECK(a.dataset == b.dataset);
    CHECK(sim_run_to_json(a) == sim_run_to_json(b));
    CHECK_FALSE(simulate_run(g, 43).dataset == a.dataset);
}

TEST_CASE("central window") {
    const auto w = central_window(99);
    CHECK(w.start == 33);
    CHECK(w.end == 65);
    CHECK(w.n() == 33);
    CHECK_THROWS_AS(central_window(5), InvalidArgument);
}

TEST_CASE("injection touches descendants only") {
    const auto base = load_ground_truth(testing::fixture("graphs/n25.json"));
    std::set<std::string> roots;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto g = randomize_weights(base, derive_seed(seed, 0));
        const auto run = inject_anomaly(g, seed);
        const auto clean = generate(g, 99, seed);
        roots.insert(run.injected_root);
        CHECK(std::find(g.eligible_roots.begin(), g.eligible_roots.end(), run.injected_root) != g.eligible_roots.end());
        const std::set<std::string> affected(run.affected.begin(), run.affected.end());
        CHECK(affected.count(run.injected_root) == 1);
        CHECK(affected.count(g.performance) == 1);
        for (const auto& m : g.graph.vertices()) {
            const auto x = run.dataset.series(m);
            const auto y = clean.series(m);
            if (!affected.count(m)) {
                CHECK(std::equal(x.begin(), x.end(), y.begin(), y.end()));
                continue;
            }
            CHECK(std::equal(x.begin(), x.begin() + 33, y.begin()));
        }
        const auto rx = run.dataset.series(run.injected_root);
        const auto ry = clean.series(run.injected_root);
        CHECK(rx[40] < ry[40]);
        const auto again = simulate_run(base, seed);
        CHECK(again.dataset == run.dataset);
    }
    CHECK(roots.size() > 1);
}

TEST_CASE("leaf root changes only itself") {
    GroundTruthGraph g;
    g.graph = CausalGraph({"p", "r", "q"});
    g.graph.add_directed("q", "p", 0);
    g.graph.add_directed("r", "p", 0);
    g.weights[{2, 0, 0}] = 0.5;
    g.weights[{1, 0, 0}] = 0.5;
    g.performance = "p";
    g.eligible_roots = {"r"};
    const auto run = inject_anomaly(g, 3);
    CHECK(run.affected == std::vector<std::string>{"p", "r"});
    const auto clean = generate(g, 99, 3);
    const auto q = run.dataset.series("q");
    const auto cq = clean.series("q");
    CHECK(std::equal(q.begin(), q.end(), cq.begin(), cq.end()));
}

TEST_CASE("illustration graph propagation") {
    const auto run = simulate_run(testing::illustration_graph(), 1);
    CHECK(run.injected_root == "X2");
    const std::set<std::string> affected(run.affected.begin(), run.affected.end());
    for (const auto m : {"X3", "X4", "X5", "X6", "X7", "X8"}) CHECK(affected.count(m) == 1);
    CHECK(affected.count("X1") == 0);
}

TEST_CASE("performance metric shifts by at least one noise std") {
    const auto base = load_ground_truth(testing::fixture("graphs/n5.json"));
    double total = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto run = simulate_run(base, 1000 + seed);
        const auto x = run.dataset.series(base.performance);
        const double inside = window_mean(x, 33, 66);
        const double flanks = (window_mean(x, 0, 33) + window_mean(x, 66, 99)) / 2;
        total += flanks - inside;
    }
    MESSAGE("mean level drop " << total / 50);
    CHECK(total / 50 >= 1.0);
}

TEST_CASE("run log") {
    const auto run = simulate_run(load_ground_truth(testing::fixture("graphs/n5.json")), 8);
    const auto j = sim_run_to_json(run);
    CHECK(j["seed"] == 8);
    CHECK(j["window"][0] == 33);
    CHECK(j["window"][1] == 65);
    CHECK(j["injected_root"] == run.injected_root);
}
