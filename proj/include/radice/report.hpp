#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "radice/pipeline.hpp"
#include "radice/subtraction.hpp"

namespace radice {

nlohmann::json report_to_json(const RootCauseReport& report);
RootCauseReport report_from_json(const nlohmann::json& j);

/// Root causes solid, intermediates dashed, the target bold.
std::string report_to_dot(const RootCauseReport& report);

/// Long format `metric,t,value,phase` for every sub-graph metric over the
/// analysed slice; `t` is the sample index in the original dataset.
std::string plot_csv(const RootCauseReport& report, const TimeSeriesDataset& analysed);

/// 1000x400 line chart of the same series (each min-max scaled), with the
/// anomaly band shaded and a legend.
std::string plot_svg(const RootCauseReport& report, const TimeSeriesDataset& analysed);

/// Root causes with scores, then filtered candidates with reasons.
std::string report_summary(const RootCauseReport& report);

/// Writes report.json, graph.dot, plot.csv and plot.svg into `dir`.
void write_diagnosis(const Diagnosis& diagnosis, const std::filesystem::path& dir);

}  // namespace radice
