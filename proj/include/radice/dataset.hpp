#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace radice {

using Series = std::vector<double>;

/// N metrics x T samples, row-major by metric. Immutable once constructed.
class TimeSeriesDataset {
public:
    TimeSeriesDataset() = default;

    /// Validates shape, name uniqueness and finiteness; throws InvalidArgument.
    TimeSeriesDataset(std::vector<std::string> names, std::vector<Series> values,
                      std::vector<std::string> timestamps = {}, std::string sample_period = {});

    std::size_t num_metrics() const noexcept { return names_.size(); }
    std::size_t length() const noexcept { return values_.empty() ? 0 : values_.front().size(); }

    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::vector<Series>& values() const noexcept { return values_; }
    /// Optional timestamp labels (empty when the source had no timestamp column).
    const std::vector<std::string>& timestamps() const noexcept { return timestamps_; }
    const std::string& sample_period() const noexcept { return sample_period_; }

    std::optional<std::size_t> index_of(const std::string& name) const;
    bool contains(const std::string& name) const { return index_of(name).has_value(); }

    /// Throws InvalidArgument for an unknown metric.
    std::span<const double> series(const std::string& name) const;
    std::span<const double> series(std::size_t index) const { return values_.at(index); }

    /// Samples [first, last] inclusive of every metric.
    TimeSeriesDataset slice(std::size_t first, std::size_t last) const;

    friend bool operator==(const TimeSeriesDataset&, const TimeSeriesDataset&) = default;

private:
    std::vector<std::string> names_;
    std::vector<Series> values_;
    std::vector<std::string> timestamps_;
    std::string sample_period_;
};

/// A dataset together with the performance metric under diagnosis.
struct DiagnosticInput {
    TimeSeriesDataset dataset;
    std::string target;

    /// Throws InvalidArgument if target is not a metric of the dataset.
    DiagnosticInput(TimeSeriesDataset data, std::string target_metric);

    /// Every metric except the target, in dataset order.
    std::vector<std::string> candidates() const;
    std::span<const double> target_series() const { return dataset.series(target); }
};

TimeSeriesDataset load_csv(const std::filesystem::path& path);
DiagnosticInput load_csv(const std::filesystem::path& path, const std::string& target);

/// Shortest round-trip formatting; save_csv followed by load_csv is value-identical.
void save_csv(const TimeSeriesDataset& dataset, const std::filesystem::path& path);

std::string format_double(double value);

// Elementary transforms ---------------------------------------------------

double mean(std::span<const double> x);
/// Population standard deviation (divides by length).
double stddev(std::span<const double> x);

/// counts[t] / totals[t]; every total must be positive and no count may exceed its total.
Series rate_convert(std::span<const double> counts, std::span<const double> totals);

/// Zero mean, unit population std. A constant series maps to all zeros.
Series normalize(std::span<const double> x);

/// Trailing moving average; the first w-1 outputs average the available prefix.
Series smooth(std::span<const double> x, std::size_t window);

/// Pairing (x[t], c[t - shift]) for t in [shift, length - 1].
struct ShiftAlignment {
    std::size_t shift = 0;
    std::size_t overlap = 0;

    std::span<const double> later(std::span<const double> x) const { return x.subspan(shift, overlap); }
    std::span<const double> earlier(std::span<const double> c) const { return c.subspan(0, overlap); }
};

ShiftAlignment shift(std::span<const double> c, std::size_t steps);

/// Pearson coefficient; 0 when either input is constant.
double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace radice
