#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "radice/anomaly_window.hpp"
#include "radice/dataset.hpp"
#include "radice/discovery.hpp"
#include "radice/entropy_orientation.hpp"
#include "radice/error.hpp"
#include "radice/evaluation.hpp"
#include "radice/pipeline.hpp"
#include "radice/refinement.hpp"
#include "radice/report.hpp"
#include "radice/simulator.hpp"

namespace py = pybind11;
using namespace radice;

namespace {

using Window = std::pair<std::size_t, std::size_t>;

TimeSeriesDataset dataset(std::vector<std::string> names, std::vector<Series> columns) {
    return TimeSeriesDataset(std::move(names), std::move(columns));
}

py::dict score_dict(const AdjustedScore& s) {
    py::dict d;
    d["score"] = s.score;
    d["corr"] = s.corr;
    d["penalty"] = s.penalty;
    d["width"] = s.width;
    d["shift"] = s.shift;
    return d;
}

const char* direction_name(Direction d) {
    switch (d) {
        case Direction::Forward: return "forward";
        case Direction::Backward: return "backward";
        default: return "inconclusive";
    }
}

}  // namespace

PYBIND11_MODULE(_radice, m) {
    m.doc() = "Root-cause diagnosis of performance-metric anomalies in multivariate time series.";

    auto base = py::register_exception<Error>(m, "RadiceError");
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<CycleError>(m, "CycleError", base.ptr());
    py::register_exception<NoAnomalyError>(m, "NoAnomalyError", base.ptr());

    m.def(
        "load_csv",
        [](const std::string& path) {
            const auto ds = load_csv(path);
            return py::make_tuple(ds.names(), ds.values());
        },
        py::arg("path"), "Returns (names, columns) of a metrics CSV.");

    m.def(
        "detect_window",
        [](const Series& x, double z_threshold) {
            DetectionConfig cfg;
            cfg.z_threshold = z_threshold;
            const auto w = detect_window(x, cfg);
            return Window{w.start, w.end};
        },
        py::arg("x"), py::arg("z_threshold") = 3.0);

    m.def(
        "adjusted_score",
        [](const Series& x, const Series& c, std::size_t max_shift, std::size_t max_width, double shift_penalty,
           double smooth_penalty) {
            RefinementConfig cfg;
            cfg.max_shift = max_shift;
            cfg.max_width = max_width;
            cfg.shift_penalty = shift_penalty;
            cfg.smooth_penalty = smooth_penalty;
            cfg.validate();
            return score_dict(adjusted_score(x, c, cfg));
        },
        py::arg("x"), py::arg("c"), py::arg("max_shift") = 1, py::arg("max_width") = 2,
        py::arg("shift_penalty") = 0.004, py::arg("smooth_penalty") = 0.01);

    m.def(
        "orient_joint",
        [](const JointTable& joint, double min_gap) {
            const auto v = orient_joint(joint, min_gap);
            py::dict d;
            d["direction"] = direction_name(v.direction);
            d["score"] = v.score;
            d["forward_entropy"] = v.forward_entropy;
            d["backward_entropy"] = v.backward_entropy;
            return d;
        },
        py::arg("joint"), py::arg("min_gap") = 0.05);

    m.def(
        "discover",
        [](std::vector<std::string> names, std::vector<Series> columns, int tau_max, std::optional<double> alpha) {
            DiscoveryConfig cfg;
            cfg.tau_max = tau_max;
            cfg.fixed_alpha = alpha;
            const auto r = discover(dataset(std::move(names), std::move(columns)), cfg);
            return py::make_tuple(graph_to_json(r.graph).dump(), r.alpha);
        },
        py::arg("names"), py::arg("columns"), py::arg("tau_max") = 1, py::arg("alpha") = std::nullopt,
        "Returns (graph JSON, alpha).");

    m.def(
        "diagnose",
        [](std::vector<std::string> names, std::vector<Series> columns, const std::string& target,
           const std::string& dk_json, std::optional<Window> window, double min_sim) {
            PipelineConfig cfg;
            if (window) cfg.window = AnomalyWindow{window->first, window->second};
            cfg.refinement.min_sim = min_sim;
            const auto dk = dk_json.empty() ? DomainKnowledgeModel{} : dk_from_json(nlohmann::json::parse(dk_json));
            py::gil_scoped_release release;
            const auto d = diagnose(DiagnosticInput(dataset(std::move(names), std::move(columns)), target), dk, cfg);
            return report_to_json(d.report).dump();
        },
        py::arg("names"), py::arg("columns"), py::arg("target"), py::arg("dk_json") = "",
        py::arg("window") = std::nullopt, py::arg("min_sim") = 0.5, "Returns the report as JSON text.");

    m.def(
        "simulate_run",
        [](const std::string& graph_json, std::uint64_t seed, double delta, std::size_t length) {
            SimulationConfig cfg;
            cfg.delta = delta;
            cfg.length = length;
            const auto run = simulate_run(ground_truth_from_json(nlohmann::json::parse(graph_json)), seed, cfg);
            py::dict d;
            d["names"] = run.dataset.names();
            d["columns"] = run.dataset.values();
            d["injected_root"] = run.injected_root;
            d["window"] = Window{run.anomaly_window.start, run.anomaly_window.end};
            d["affected"] = run.affected;
            return d;
        },
        py::arg("graph_json"), py::arg("seed"), py::arg("delta") = 3.0, py::arg("length") = 99);

    m.def(
        "run_experiment",
        [](const std::vector<std::string>& fixtures, const std::string& variants, std::size_t runs,
           std::uint64_t seed, std::size_t jobs) {
            std::vector<Fixture> loaded;
            for (const auto& f : fixtures) loaded.push_back(load_fixture(f));
            ExperimentConfig cfg;
            cfg.runs_per_graph = runs;
            cfg.seed = seed;
            cfg.jobs = jobs;
            const auto parsed = parse_variants(variants);
            py::gil_scoped_release release;
            return results_to_csv(run_experiment(loaded, parsed, cfg));
        },
        py::arg("fixtures"), py::arg("variants") = "nodk,L", py::arg("runs") = 50, py::arg("seed") = 0,
        py::arg("jobs") = 1, "Returns the results table as CSV text.");
}
