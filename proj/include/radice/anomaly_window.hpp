#pragma once

#include <cstddef>
#include <span>

#include "radice/dataset.hpp"

namespace radice {

/// Inclusive sample range [start, end] of the anomalous behaviour.
struct AnomalyWindow {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t n() const noexcept { return end - start + 1; }
    /// True when n >= 2 and both n-sample flanks fit inside [0, length).
    bool has_flanks(std::size_t length) const noexcept;

    friend bool operator==(const AnomalyWindow&, const AnomalyWindow&) = default;
};

struct DetectionConfig {
    double z_threshold = 3.0;
};

/// Robust z-scores (median / scaled MAD). When the MAD vanishes the scale falls
/// back to the mean absolute deviation around the median; all zeros when the
/// series is constant.
Series robust_z_scores(std::span<const double> x);

/// Longest-mass drop of the performance series: the contiguous run (length >= 2)
/// of samples with robust z below -k carrying the largest cumulative deviation.
/// Throws NoAnomalyError when no run exists and InvalidArgument when the chosen
/// run has no room for its flanks.
AnomalyWindow detect_window(std::span<const double> x, const DetectionConfig& config = {});

/// Restricts every metric to [start - n, end + n] (length 3n).
DiagnosticInput slice_3n(const DiagnosticInput& input, const AnomalyWindow& window);

}  // namespace radice
