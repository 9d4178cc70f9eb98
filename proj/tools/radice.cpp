// radice: diagnose a performance drop, simulate benchmark data, evaluate variants.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "radice/error.hpp"
#include "radice/evaluation.hpp"
#include "radice/pipeline.hpp"
#include "radice/report.hpp"
#include "radice/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kNoAnomaly = 2, kNoRootCause = 3 };

struct PipelineFlags {
    std::optional<std::string> window;
    std::optional<double> z_threshold;
    std::optional<int> tau_max;
    std::optional<double> alpha;
    std::optional<double> min_sim;
    std::optional<std::size_t> max_shift;
    std::optional<std::size_t> max_width;
    std::optional<double> shift_penalty;
    std::optional<double> smooth_penalty;
    std::optional<std::size_t> entropy_bins;
    std::optional<double> entropy_min_gap;
};

struct Args {
    std::string config;
    std::string data, target, dk, out;
    std::string graph, fixtures, variants = "nodk,L,L10E,L25E,L50E,P_nodk", compare;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    PipelineFlags pipeline;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
    cmd->add_option("--window", f.window, "Manual anomaly window START:END (sample indices, inclusive)");
    cmd->add_option("--z-threshold", f.z_threshold, "Robust z-score threshold for drop detection");
    cmd->add_option("--tau-max", f.tau_max, "Maximum lag for discovery");
    cmd->add_option("--alpha", f.alpha, "Fixed significance level (default: chosen by BIC)");
    cmd->add_option("--min-sim", f.min_sim, "Minimum adjusted correlation score");
    cmd->add_option("--max-shift", f.max_shift, "Maximum time shift");
    cmd->add_option("--max-width", f.max_width, "Maximum smoothing width");
    cmd->add_option("--shift-penalty", f.shift_penalty, "Penalty per shift step");
    cmd->add_option("--smooth-penalty", f.smooth_penalty, "Penalty per extra smoothing step");
    cmd->add_option("--entropy-bins", f.entropy_bins, "Quantile bins for entropic orientation");
    cmd->add_option("--entropy-min-gap", f.entropy_min_gap, "Minimum entropy gap in bits");
}

/// Looks up `key` in either its hyphenated or underscored spelling.
const json* config_value(const json& cfg, const std::string& key) {
    if (cfg.contains(key)) return &cfg.at(key);
    std::string alt = key;
    std::replace(alt.begin(), alt.end(), '-', '_');
    if (cfg.contains(alt)) return &cfg.at(alt);
    return nullptr;
}

template <class T>
void merge(std::optional<T>& flag, const json& cfg, const std::string& key) {
    if (flag) return;
    if (const json* v = config_value(cfg, key)) flag = v->get<T>();
}

void merge(std::string& flag, const json& cfg, const std::string& key, const std::string& fallback = {}) {
    if (flag != fallback) return;
    if (const json* v = config_value(cfg, key)) flag = v->get<std::string>();
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw radice::InvalidArgument("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw radice::ParseError("config '" + path + "': " + ex.what());
    }
    if (!j.is_object()) throw radice::ParseError("config '" + path + "': expected a JSON object");
    return j;
}

/// Flags override the config file, which overrides defaults.
void merge_config(Args& a, const json& cfg) {
    const std::string default_variants = "nodk,L,L10E,L25E,L50E,P_nodk";
    merge(a.data, cfg, "data");
    merge(a.target, cfg, "target");
    merge(a.dk, cfg, "dk");
    merge(a.out, cfg, "out");
    merge(a.graph, cfg, "graph");
    merge(a.fixtures, cfg, "fixtures");
    merge(a.variants, cfg, "variants", default_variants);
    merge(a.compare, cfg, "compare");
    merge(a.runs, cfg, "runs");
    merge(a.seed, cfg, "seed");
    merge(a.jobs, cfg, "jobs");
    auto& p = a.pipeline;
    merge(p.window, cfg, "window");
    merge(p.z_threshold, cfg, "z-threshold");
    merge(p.tau_max, cfg, "tau-max");
    merge(p.alpha, cfg, "alpha");
    merge(p.min_sim, cfg, "min-sim");
    merge(p.max_shift, cfg, "max-shift");
    merge(p.max_width, cfg, "max-width");
    merge(p.shift_penalty, cfg, "shift-penalty");
    merge(p.smooth_penalty, cfg, "smooth-penalty");
    merge(p.entropy_bins, cfg, "entropy-bins");
    merge(p.entropy_min_gap, cfg, "entropy-min-gap");
}

radice::AnomalyWindow parse_window(const std::string& text) {
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) throw std::invalid_argument("missing ':'");
        std::size_t used = 0;
        const auto start = std::stoul(text.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("trailing characters");
        const std::string rest = text.substr(colon + 1);
        const auto end = std::stoul(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("trailing characters");
        if (end < start) throw std::invalid_argument("end before start");
        return radice::AnomalyWindow{start, end};
    } catch (const std::exception&) {
        throw radice::InvalidArgument("--window expects START:END with START <= END, got '" + text + "'");
    }
}

radice::PipelineConfig build_pipeline(const PipelineFlags& f) {
    radice::PipelineConfig c;
    if (f.window) c.window = parse_window(*f.window);
    if (f.z_threshold) c.detection.z_threshold = *f.z_threshold;
    if (f.tau_max) c.discovery.tau_max = *f.tau_max;
    if (f.alpha) c.discovery.fixed_alpha = *f.alpha;
    if (f.min_sim) c.refinement.min_sim = *f.min_sim;
    if (f.max_shift) c.refinement.max_shift = *f.max_shift;
    if (f.max_width) c.refinement.max_width = *f.max_width;
    if (f.shift_penalty) c.refinement.shift_penalty = *f.shift_penalty;
    if (f.smooth_penalty) c.refinement.smooth_penalty = *f.smooth_penalty;
    if (f.entropy_bins) c.entropy.bins = *f.entropy_bins;
    if (f.entropy_min_gap) c.entropy.min_gap = *f.entropy_min_gap;
    c.validate();
    return c;
}

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw radice::InvalidArgument(std::string(flag) + " is required");
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw radice::InvalidArgument("cannot write '" + path.string() + "'");
    out << text;
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw radice::InvalidArgument("cannot create '" + dir.string() + "': " + ec.message());
}

int cmd_diagnose(const Args& a) {
    require(a.data, "--data");
    require(a.target, "--target");
    require(a.out, "--out");
    const auto config = build_pipeline(a.pipeline);
    const auto input = radice::load_csv(a.data, a.target);
    const auto dk = a.dk.empty() ? radice::DomainKnowledgeModel{} : radice::load_dk(a.dk);

    const auto diagnosis = radice::diagnose(input, dk, config);
    radice::write_diagnosis(diagnosis, a.out);
    std::cout << radice::report_summary(diagnosis.report);
    return diagnosis.report.root_causes.empty() ? kNoRootCause : kOk;
}

int cmd_simulate(const Args& a) {
    require(a.graph, "--graph");
    require(a.out, "--out");
    const auto truth = radice::load_ground_truth(a.graph);
    const std::size_t runs = a.runs.value_or(50);
    const std::uint64_t seed = a.seed.value_or(0);
    const radice::SimulationConfig sim;

    make_dir(a.out);
    json manifest{{"graph", fs::path(a.graph).filename().string()},
                  {"performance", truth.performance},
                  {"length", sim.length},
                  {"delta", sim.delta},
                  {"seed", seed},
                  {"runs", json::array()}};
    for (std::size_t k = 0; k < runs; ++k) {
        const auto run = radice::simulate_run(truth, radice::derive_seed(seed, k), sim);
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu.csv", k);
        radice::save_csv(run.dataset, fs::path(a.out) / name);
        json entry = radice::sim_run_to_json(run);
        entry["file"] = name;
        manifest["runs"].push_back(entry);
    }
    write_file(fs::path(a.out) / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << runs << " run(s) to " << a.out << '\n';
    return kOk;
}

std::vector<fs::path> fixture_paths(const std::string& spec) {
    std::vector<fs::path> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (fs::is_directory(item)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::directory_iterator(item)) {
                if (entry.path().extension() == ".json") found.push_back(entry.path());
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            out.emplace_back(item);
        }
    }
    if (out.empty()) throw radice::InvalidArgument("--fixtures names no fixture files");
    return out;
}

int cmd_evaluate(const Args& a) {
    require(a.fixtures, "--fixtures");
    const auto variants = radice::parse_variants(a.variants);
    std::vector<radice::Fixture> fixtures;
    for (const auto& p : fixture_paths(a.fixtures)) fixtures.push_back(radice::load_fixture(p));
    std::stable_sort(fixtures.begin(), fixtures.end(), [](const auto& x, const auto& y) {
        return x.truth.graph.num_vertices() < y.truth.graph.num_vertices();
    });

    radice::ExperimentConfig cfg;
    cfg.runs_per_graph = a.runs.value_or(50);
    cfg.seed = a.seed.value_or(0);
    cfg.jobs = a.jobs.value_or(1);
    cfg.pipeline = build_pipeline(a.pipeline);
    if (cfg.pipeline.window) throw radice::InvalidArgument("--window does not apply to evaluate");

    const auto rows = radice::run_experiment(fixtures, variants, cfg);
    const std::string csv = radice::results_to_csv(rows);
    if (a.out.empty()) {
        std::cout << csv;
    } else {
        make_dir(a.out);
        write_file(fs::path(a.out) / "results.csv", csv);
        std::cout << "wrote " << (fs::path(a.out) / "results.csv").string() << '\n';
    }
    for (const auto& r : rows) {
        if (r.failures) std::cerr << "N=" << r.graph_size << ' ' << r.variant << ": " << r.failures << " run(s) failed\n";
    }
    if (!a.compare.empty()) {
        for (const auto& line : radice::compare_to_reference(rows, radice::load_reference(a.compare))) {
            std::cout << line << '\n';
        }
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Root-cause diagnosis of performance drops from metric time series"};
    app.require_subcommand(1);
    Args args;

    auto* diag = app.add_subcommand("diagnose", "Find root causes of a drop in the target metric");
    diag->add_option("--data", args.data, "CSV of metric time series");
    diag->add_option("--target", args.target, "Performance metric to diagnose");
    diag->add_option("--dk", args.dk, "Domain knowledge JSON");
    diag->add_option("--out", args.out, "Output directory");
    diag->add_option("--config", args.config, "JSON config using the flag names as keys");
    add_pipeline_flags(diag, args.pipeline);

    auto* sim = app.add_subcommand("simulate", "Generate anomalous datasets from a ground-truth graph");
    sim->add_option("--graph", args.graph, "Ground-truth graph JSON");
    sim->add_option("--runs", args.runs, "Number of datasets (default 50)");
    sim->add_option("--seed", args.seed, "Base seed (default 0)");
    sim->add_option("--out", args.out, "Output directory");
    sim->add_option("--config", args.config, "JSON config using the flag names as keys");

    auto* eval = app.add_subcommand("evaluate", "Score variants over simulated datasets");
    eval->add_option("--fixtures", args.fixtures, "Comma-separated fixture files or directories");
    eval->add_option("--variants", args.variants, "Comma-separated variants (nodk, L, L<k>E, P_..., pcmci)");
    eval->add_option("--runs", args.runs, "Datasets per fixture (default 50)");
    eval->add_option("--seed", args.seed, "Base seed (default 0)");
    eval->add_option("--jobs", args.jobs, "Parallel workers (default 1)");
    eval->add_option("--out", args.out, "Output directory for results.csv (default: stdout)");
    eval->add_option("--compare", args.compare, "Reference table CSV to print deltas against");
    eval->add_option("--config", args.config, "JSON config using the flag names as keys");
    add_pipeline_flags(eval, args.pipeline);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kFailure;
    }

    try {
        merge_config(args, load_config(args.config));
        if (diag->parsed()) return cmd_diagnose(args);
        if (sim->parsed()) return cmd_simulate(args);
        return cmd_evaluate(args);
    } catch (const radice::NoAnomalyError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNoAnomaly;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
