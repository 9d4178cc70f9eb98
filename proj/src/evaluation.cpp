#include "radice/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <set>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "radice/anomaly_window.hpp"
#include "radice/discovery.hpp"
#include "radice/error.hpp"

namespace radice {

void VariantSpec::validate() const {
    if (dk_edge_percent < 0 || dk_edge_percent > 100) throw InvalidArgument("variant: edge percentage out of range");
    if (dk_edge_percent > 0 && !use_levels) throw InvalidArgument("variant: domain edges require levels");
    if (raw_discovery && (use_levels || !use_adjusted_score)) throw InvalidArgument("variant: pcmci takes no options");
}

VariantSpec VariantSpec::parse(const std::string& name) {
    VariantSpec v;
    v.name = name;
    if (name == "pcmci") {
        v.raw_discovery = true;
        return v;
    }
    std::string rest = name;
    if (rest.starts_with("P_")) {
        v.use_adjusted_score = false;
        rest = rest.substr(2);
    }
    if (rest == "nodk") return v;
    if (rest.empty() || rest.front() != 'L') throw InvalidArgument("unknown variant '" + name + "'");
    v.use_levels = true;
    rest = rest.substr(1);
    if (rest.empty()) return v;
    if (rest.size() < 2 || rest.back() != 'E') throw InvalidArgument("unknown variant '" + name + "'");
    const std::string digits = rest.substr(0, rest.size() - 1);
    if (!std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw InvalidArgument("unknown variant '" + name + "'");
    }
    v.dk_edge_percent = std::stoi(digits);
    if (v.dk_edge_percent <= 0) throw InvalidArgument("unknown variant '" + name + "'");
    v.validate();
    return v;
}

std::vector<VariantSpec> parse_variants(const std::string& comma_list) {
    std::vector<VariantSpec> out;
    std::stringstream ss(comma_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(VariantSpec::parse(item));
    }
    if (out.empty()) throw InvalidArgument("no variants given");
    return out;
}

std::map<std::string, int> topological_levels(const CausalGraph& g) {
    const std::size_t n = g.num_vertices();
    std::vector<std::vector<std::size_t>> succ(n);
    std::vector<int> indeg(n, 0);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : g.directed()) {
        if (e.from == e.to || !seen.emplace(e.from, e.to).second) continue;
        succ[e.from].push_back(e.to);
        ++indeg[e.to];
    }
    std::vector<int> level(n, 0);
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v) {
        if (indeg[v] == 0) ready.push_back(v);
    }
    std::size_t done = 0;
    while (!ready.empty()) {
        const std::size_t v = ready.back();
        ready.pop_back();
        ++done;
        for (std::size_t w : succ[v]) {
            level[w] = std::max(level[w], level[v] + 1);
            if (--indeg[w] == 0) ready.push_back(w);
        }
    }
    if (done != n) throw InvalidArgument("topological_levels: graph has a directed cycle across lags");
    std::map<std::string, int> out;
    for (std::size_t v = 0; v < n; ++v) out[g.name(v)] = level[v];
    return out;
}

DomainKnowledgeModel make_dk_for_variant(const GroundTruthGraph& truth, const VariantSpec& variant, std::uint64_t seed) {
    variant.validate();
    DomainKnowledgeModel dk;
    if (!variant.use_levels) return dk;
    dk.partial.levels = topological_levels(truth.graph);

    std::vector<DirectedEdge> lag0;
    for (const auto& e : truth.graph.directed()) {
        if (e.lag == 0) lag0.push_back(e);
    }
    const auto want = static_cast<std::size_t>(
        std::ceil(static_cast<double>(variant.dk_edge_percent) * static_cast<double>(lag0.size()) / 100.0 - 1e-9));
    std::mt19937_64 rng(seed);
    std::shuffle(lag0.begin(), lag0.end(), rng);
    lag0.resize(std::min(want, lag0.size()));
    std::sort(lag0.begin(), lag0.end());
    for (const auto& e : lag0) dk.partial.domain_edges.emplace_back(truth.graph.name(e.from), truth.graph.name(e.to));
    return dk;
}

RunScore score_run(const std::vector<std::string>& root_causes, const SimRun& truth) {
    RunScore s;
    s.hit = std::find(root_causes.begin(), root_causes.end(), truth.injected_root) != root_causes.end();
    s.precision = root_causes.empty() ? 0.0 : (s.hit ? 1.0 : 0.0) / static_cast<double>(root_causes.size());
    return s;
}

RunScore score_run(const RootCauseReport& report, const SimRun& truth) {
    std::vector<std::string> names;
    for (const auto& c : report.root_causes) names.push_back(c.metric);
    return score_run(names, truth);
}

std::vector<std::string> raw_discovery_root_causes(const CausalGraph& discovered, const std::string& target) {
    const std::size_t t = discovered.require(target);
    std::vector<std::string> out;
    for (std::size_t v = 0; v < discovered.num_vertices(); ++v) {
        if (v != t && discovered.has_causal_path(v, t)) out.push_back(discovered.name(v));
    }
    return out;
}

Fixture load_fixture(const std::filesystem::path& path) {
    Fixture f;
    f.truth = load_ground_truth(path);
    f.label = path.stem().string();
    return f;
}

namespace {

struct Outcome {
    RunScore score;
    double seconds = 0.0;
    bool failed = false;
};

Outcome run_variant(const Fixture& fixture, const SimRun& run, const VariantSpec& variant, const ExperimentConfig& config) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const DiagnosticInput input(run.dataset, fixture.truth.performance);
        if (variant.raw_discovery) {
            const auto sliced = slice_3n(input, run.anomaly_window);
            const auto result = discover(sliced, config.pipeline.discovery);
            out.score = score_run(raw_discovery_root_causes(result.graph, input.target), run);
        } else {
            PipelineConfig pc = config.pipeline;
            pc.window = run.anomaly_window;
            if (!variant.use_adjusted_score) pc.refinement = RefinementConfig::pearson_only(pc.refinement.min_sim);
            const auto dk = make_dk_for_variant(fixture.truth, variant, derive_seed(run.seed, 2));
            out.score = score_run(diagnose(input, dk, pc).report, run);
        }
    } catch (const Error&) {
        out = Outcome{};
        out.failed = true;
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace

std::vector<EvalRow> run_experiment(const std::vector<Fixture>& fixtures, const std::vector<VariantSpec>& variants,
                                    const ExperimentConfig& config) {
    for (const auto& v : variants) v.validate();
    const std::size_t runs = config.runs_per_graph;
    const std::size_t nv = variants.size();
    const std::size_t tasks = fixtures.size() * runs;
    std::vector<Outcome> outcomes(tasks * nv);

    auto work = [&](std::size_t task) {
        const std::size_t f = task / runs;
        const std::size_t k = task % runs;
        const auto& fixture = fixtures[f];
        const std::uint64_t run_seed = derive_seed(derive_seed(config.seed, fixture.truth.graph.num_vertices()), k);
        SimRun run;
        try {
            run = simulate_run(fixture.truth, run_seed, config.simulation);
        } catch (const Error&) {
            for (std::size_t v = 0; v < nv; ++v) outcomes[task * nv + v].failed = true;
            return;
        }
        for (std::size_t v = 0; v < nv; ++v) outcomes[task * nv + v] = run_variant(fixture, run, variants[v], config);
    };

    const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, tasks));
    if (jobs == 1) {
        for (std::size_t t = 0; t < tasks; ++t) work(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) {
            pool.emplace_back([&] {
                for (std::size_t t = next++; t < tasks; t = next++) work(t);
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<EvalRow> rows;
    for (std::size_t f = 0; f < fixtures.size(); ++f) {
        for (std::size_t v = 0; v < nv; ++v) {
            EvalRow row;
            row.graph_size = fixtures[f].truth.graph.num_vertices();
            row.variant = variants[v].name;
            row.runs = runs;
            row.seed = config.seed;
            double hits = 0.0, prec = 0.0, secs = 0.0;
            for (std::size_t k = 0; k < runs; ++k) {
                const auto& o = outcomes[(f * runs + k) * nv + v];
                hits += o.score.hit ? 1.0 : 0.0;
                prec += o.score.precision;
                secs += o.seconds;
                if (o.failed) ++row.failures;
            }
            if (runs > 0) {
                row.recall = hits / static_cast<double>(runs);
                row.precision = prec / static_cast<double>(runs);
                row.mean_runtime_s = secs / static_cast<double>(runs);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

namespace {

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        cells.push_back(cell);
    }
    return cells;
}

}  // namespace

std::string results_to_csv(const std::vector<EvalRow>& rows) {
    std::string out = "graph_size,variant,recall,precision,mean_runtime_s,runs,seed\n";
    for (const auto& r : rows) {
        out += std::to_string(r.graph_size) + ',' + r.variant + ',' + fixed(r.recall, 4) + ',' +
               fixed(r.precision, 4) + ',' + fixed(r.mean_runtime_s, 4) + ',' + std::to_string(r.runs) + ',' +
               std::to_string(r.seed) + '\n';
    }
    return out;
}

std::vector<ReferenceRow> load_reference(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("'" + path.string() + "': empty reference table");
    const auto header = split_csv_line(line);
    auto col = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ParseError("'" + path.string() + "': missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t cs = col("graph_size"), cv = col("variant"), cr = col("recall"), cp = col("precision");
    std::vector<ReferenceRow> out;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) throw ParseError("'" + path.string() + "': ragged row");
        try {
            out.push_back(ReferenceRow{std::stoul(cells[cs]), cells[cv], std::stod(cells[cr]), std::stod(cells[cp])});
        } catch (const std::exception&) {
            throw ParseError("'" + path.string() + "': bad number in '" + line + "'");
        }
    }
    return out;
}

std::vector<std::string> compare_to_reference(const std::vector<EvalRow>& rows, const std::vector<ReferenceRow>& ref) {
    std::vector<std::string> out;
    for (const auto& r : rows) {
        for (const auto& p : ref) {
            if (p.graph_size != r.graph_size || p.variant != r.variant) continue;
            const double dr = r.recall - p.recall;
            const double dp = r.precision - p.precision;
            out.push_back("N=" + std::to_string(r.graph_size) + " " + r.variant + ": recall " + fixed(r.recall, 2) +
                          " vs " + fixed(p.recall, 2) + " (" + (dr >= 0 ? "+" : "") + fixed(dr, 2) + "), precision " +
                          fixed(r.precision, 2) + " vs " + fixed(p.precision, 2) + " (" + (dp >= 0 ? "+" : "") +
                          fixed(dp, 2) + ")");
        }
    }
    return out;
}

}  // namespace radice
