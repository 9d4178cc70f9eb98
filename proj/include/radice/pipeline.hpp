#pragma once

#include <optional>
#include <string>
#include <vector>

#include "radice/anomaly_window.hpp"
#include "radice/causal_graph.hpp"
#include "radice/dataset.hpp"
#include "radice/discovery.hpp"
#include "radice/domain_knowledge.hpp"
#include "radice/entropy_orientation.hpp"
#include "radice/refinement.hpp"
#include "radice/subtraction.hpp"

namespace radice {

struct PipelineConfig {
    DetectionConfig detection;
    /// Skips detection when set.
    std::optional<AnomalyWindow> window;
    DiscoveryConfig discovery;
    EntropyConfig entropy;
    RefinementConfig refinement;

    void validate() const;
};

struct Diagnosis {
    RootCauseReport report;
    /// The 3n-sample analysis slice.
    DiagnosticInput analysed;
    CausalGraph discovered;
    CausalGraph enhanced;
    double alpha = 0.0;
    std::vector<std::string> log;
};

/// Detect (or take) the anomaly window, slice 3n samples, then discover,
/// enhance, refine and subtract. Validates `dk` against the dataset metrics.
Diagnosis diagnose(const DiagnosticInput& input, const DomainKnowledgeModel& dk, const PipelineConfig& config = {});

}  // namespace radice
