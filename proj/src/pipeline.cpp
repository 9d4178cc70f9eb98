#include "radice/pipeline.hpp"

#include <set>

#include "radice/enhancement.hpp"
#include "radice/error.hpp"

namespace radice {

void PipelineConfig::validate() const {
    if (!(detection.z_threshold > 0.0)) throw InvalidArgument("z threshold must be positive");
    discovery.validate();
    entropy.validate();
    refinement.validate();
}

Diagnosis diagnose(const DiagnosticInput& input, const DomainKnowledgeModel& dk, const PipelineConfig& config) {
    config.validate();
    const auto& names = input.dataset.names();
    validate(dk, std::set<std::string>(names.begin(), names.end()));

    const AnomalyWindow window = config.window ? *config.window : detect_window(input.target_series(), config.detection);
    Diagnosis d{RootCauseReport{}, slice_3n(input, window), CausalGraph{}, CausalGraph{}, 0.0, {}};

    auto discovery = discover(d.analysed, config.discovery);
    d.discovered = std::move(discovery.graph);
    d.alpha = discovery.alpha;
    if (discovery.low_sample_warning) d.log.push_back("few samples for the requested tau_max; discovery may be unreliable");

    auto enhanced = enhance(d.discovered, dk.partial, d.analysed.dataset, config.entropy);
    d.enhanced = std::move(enhanced.graph);
    for (auto& line : enhanced.log) d.log.push_back(std::move(line));

    auto refined = refine(d.analysed, dk, config.refinement);
    d.report = subtract(d.enhanced, refined.root_causes, input.target, dk.partial);
    d.report.window = window;
    d.report.below_min_sim = std::move(refined.below_min_sim);
    d.report.sign_rule = std::move(refined.sign_rule);
    for (const auto& w : d.report.warnings) d.log.push_back(w);
    return d;
}

}  // namespace radice
