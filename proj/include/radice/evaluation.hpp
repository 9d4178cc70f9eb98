#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radice/domain_knowledge.hpp"
#include "radice/pipeline.hpp"
#include "radice/simulator.hpp"
#include "radice/subtraction.hpp"

namespace radice {

/// One column of the experiment ladder. Names: `nodk`, `L`, `L<k>E`, the same
/// with a `P_` prefix for Pearson-only scoring, and `pcmci` for raw discovery.
struct VariantSpec {
    std::string name;
    bool use_levels = false;
    int dk_edge_percent = 0;
    bool use_adjusted_score = true;
    bool raw_discovery = false;

    void validate() const;
    static VariantSpec parse(const std::string& name);
};

std::vector<VariantSpec> parse_variants(const std::string& comma_list);

/// Longest-path rank from the sources over every directed edge.
std::map<std::string, int> topological_levels(const CausalGraph& g);

DomainKnowledgeModel make_dk_for_variant(const GroundTruthGraph& truth, const VariantSpec& variant, std::uint64_t seed);

struct RunScore {
    bool hit = false;
    double precision = 0.0;
};

RunScore score_run(const std::vector<std::string>& root_causes, const SimRun& truth);
RunScore score_run(const RootCauseReport& report, const SimRun& truth);

/// Every metric with a directed causal path to the target in the discovered graph.
std::vector<std::string> raw_discovery_root_causes(const CausalGraph& discovered, const std::string& target);

struct Fixture {
    std::string label;
    GroundTruthGraph truth;
};

Fixture load_fixture(const std::filesystem::path& path);

struct ExperimentConfig {
    std::size_t runs_per_graph = 50;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    SimulationConfig simulation;
    /// Base settings; the window and the scoring mode are set per run and variant.
    PipelineConfig pipeline;
};

struct EvalRow {
    std::size_t graph_size = 0;
    std::string variant;
    double recall = 0.0;
    double precision = 0.0;
    double mean_runtime_s = 0.0;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
    std::size_t failures = 0;
};

/// Rows ordered by fixture, then variant, as given.
std::vector<EvalRow> run_experiment(const std::vector<Fixture>& fixtures, const std::vector<VariantSpec>& variants,
                                    const ExperimentConfig& config);

/// `graph_size,variant,recall,precision,mean_runtime_s,runs,seed`
std::string results_to_csv(const std::vector<EvalRow>& rows);

struct ReferenceRow {
    std::size_t graph_size = 0;
    std::string variant;
    double recall = 0.0;
    double precision = 0.0;
};

/// Reads a reference table with at least graph_size, variant, recall, precision.
std::vector<ReferenceRow> load_reference(const std::filesystem::path& path);

/// Human-readable delta lines for every row present in both tables.
std::vector<std::string> compare_to_reference(const std::vector<EvalRow>& rows, const std::vector<ReferenceRow>& ref);

}  // namespace radice
