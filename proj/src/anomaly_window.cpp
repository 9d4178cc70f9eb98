#include "radice/anomaly_window.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "radice/error.hpp"

namespace radice {

namespace {

double median(Series v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid))) / 2.0;
    }
    return m;
}

// Consistency constants for normal data.
constexpr double kMadScale = 1.4826;
constexpr double kMeanAdScale = 1.253314;

}  // namespace

bool AnomalyWindow::has_flanks(std::size_t length) const noexcept {
    if (end < start) return false;
    const std::size_t len = n();
    return len >= 2 && start >= len && end + len < length;
}

Series robust_z_scores(std::span<const double> x) {
    Series z(x.size(), 0.0);
    if (x.empty()) return z;
    const double med = median(Series(x.begin(), x.end()));
    Series dev(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) dev[i] = std::abs(x[i] - med);

    double scale = kMadScale * median(dev);
    if (scale <= 1e-12 * std::max(1.0, std::abs(med))) {
        double mean_ad = 0.0;
        for (double d : dev) mean_ad += d;
        mean_ad /= static_cast<double>(dev.size());
        scale = kMeanAdScale * mean_ad;
        if (scale <= 1e-12 * std::max(1.0, std::abs(med))) return z;
    }
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - med) / scale;
    return z;
}

AnomalyWindow detect_window(std::span<const double> x, const DetectionConfig& config) {
    if (x.size() < 6) throw InvalidArgument("detect_window: need at least 6 samples");
    if (!(config.z_threshold > 0.0)) throw InvalidArgument("detect_window: z threshold must be positive");

    const Series z = robust_z_scores(x);
    std::optional<AnomalyWindow> best;
    double best_mass = 0.0;
    std::size_t t = 0;
    while (t < z.size()) {
        if (!(z[t] < -config.z_threshold)) {
            ++t;
            continue;
        }
        const std::size_t first = t;
        double mass = 0.0;
        while (t < z.size() && z[t] < -config.z_threshold) mass += -z[t++];
        const AnomalyWindow run{first, t - 1};
        if (run.n() >= 2 && (!best || mass > best_mass)) {
            best = run;
            best_mass = mass;
        }
    }
    if (!best) throw NoAnomalyError("no anomaly detected");
    if (!best->has_flanks(x.size())) {
        throw InvalidArgument("anomaly window [" + std::to_string(best->start) + "," + std::to_string(best->end) +
                              "] is too close to the series boundary for " + std::to_string(best->n()) +
                              "-sample flanks");
    }
    return *best;
}

DiagnosticInput slice_3n(const DiagnosticInput& input, const AnomalyWindow& window) {
    const std::size_t len = input.dataset.length();
    if (!window.has_flanks(len)) {
        throw InvalidArgument("window [" + std::to_string(window.start) + "," + std::to_string(window.end) +
                              "] lacks full flanks in a series of length " + std::to_string(len));
    }
    const std::size_t n = window.n();
    return DiagnosticInput(input.dataset.slice(window.start - n, window.end + n), input.target);
}

}  // namespace radice
