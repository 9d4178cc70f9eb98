#include "radice/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "radice/error.hpp"

namespace radice {

TimeSeriesDataset::TimeSeriesDataset(std::vector<std::string> names, std::vector<Series> values,
                                     std::vector<std::string> timestamps, std::string sample_period)
    : names_(std::move(names)),
      values_(std::move(values)),
      timestamps_(std::move(timestamps)),
      sample_period_(std::move(sample_period)) {
    if (names_.size() != values_.size()) {
        throw InvalidArgument("dataset: " + std::to_string(names_.size()) + " names for " +
                              std::to_string(values_.size()) + " series");
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : names_) {
        if (name.empty()) throw InvalidArgument("dataset: empty metric name");
        if (!seen.insert(name).second) throw InvalidArgument("dataset: duplicate metric name '" + name + "'");
    }
    const std::size_t len = length();
    if (!values_.empty() && len == 0) throw InvalidArgument("dataset: series must have at least one sample");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i].size() != len) throw InvalidArgument("dataset: series '" + names_[i] + "' has ragged length");
        for (double v : values_[i]) {
            if (!std::isfinite(v)) throw InvalidArgument("dataset: non-finite value in '" + names_[i] + "'");
        }
    }
    if (!timestamps_.empty() && timestamps_.size() != len) {
        throw InvalidArgument("dataset: timestamp column length does not match series length");
    }
}

std::optional<std::size_t> TimeSeriesDataset::index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

std::span<const double> TimeSeriesDataset::series(const std::string& name) const {
    auto idx = index_of(name);
    if (!idx) throw InvalidArgument("unknown metric '" + name + "'");
    return values_[*idx];
}

TimeSeriesDataset TimeSeriesDataset::slice(std::size_t first, std::size_t last) const {
    if (first > last || last >= length()) throw InvalidArgument("dataset slice out of range");
    std::vector<Series> out;
    out.reserve(values_.size());
    for (const auto& s : values_) out.emplace_back(s.begin() + first, s.begin() + last + 1);
    std::vector<std::string> ts;
    if (!timestamps_.empty()) ts.assign(timestamps_.begin() + first, timestamps_.begin() + last + 1);
    return TimeSeriesDataset(names_, std::move(out), std::move(ts), sample_period_);
}

DiagnosticInput::DiagnosticInput(TimeSeriesDataset data, std::string target_metric)
    : dataset(std::move(data)), target(std::move(target_metric)) {
    if (!dataset.contains(target)) throw InvalidArgument("target not found: '" + target + "'");
}

std::vector<std::string> DiagnosticInput::candidates() const {
    std::vector<std::string> out;
    for (const auto& n : dataset.names()) {
        if (n != target) out.push_back(n);
    }
    return out;
}

// CSV ---------------------------------------------------------------------

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::optional<double> parse_number(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

}  // namespace

TimeSeriesDataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open CSV '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw ParseError("CSV '" + path.string() + "' is empty");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header = split_row(line);
    for (auto& h : header) h = trim(h);

    std::vector<std::vector<std::string>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto cells = split_row(line);
        if (cells.size() != header.size()) {
            throw ParseError("CSV line " + std::to_string(line_no) + ": ragged row (" + std::to_string(cells.size()) +
                             " cells, header has " + std::to_string(header.size()) + ")");
        }
        for (auto& c : cells) c = trim(c);
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw ParseError("CSV '" + path.string() + "' has no data rows");

    bool has_timestamp = !header.empty() && header.front() == "timestamp";
    if (!has_timestamp && !header.empty() && !parse_number(rows.front().front())) has_timestamp = true;

    const std::size_t first_col = has_timestamp ? 1 : 0;
    std::vector<std::string> names(header.begin() + static_cast<std::ptrdiff_t>(first_col), header.end());
    {
        std::unordered_set<std::string> seen;
        for (const auto& n : names) {
            if (!seen.insert(n).second) throw ParseError("CSV: duplicate header name '" + n + "'");
        }
    }

    std::vector<Series> values(names.size(), Series(rows.size()));
    std::vector<std::string> timestamps;
    if (has_timestamp) timestamps.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (has_timestamp) timestamps.push_back(rows[r][0]);
        for (std::size_t c = first_col; c < header.size(); ++c) {
            auto v = parse_number(rows[r][c]);
            if (!v) {
                throw ParseError("CSV row " + std::to_string(r + 2) + ", column '" + header[c] +
                                 "': non-numeric cell '" + rows[r][c] + "'");
            }
            if (!std::isfinite(*v)) {
                throw ParseError("CSV row " + std::to_string(r + 2) + ", column '" + header[c] + "': non-finite value");
            }
            values[c - first_col][r] = *v;
        }
    }
    try {
        return TimeSeriesDataset(std::move(names), std::move(values), std::move(timestamps));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

DiagnosticInput load_csv(const std::filesystem::path& path, const std::string& target) {
    return DiagnosticInput(load_csv(path), target);
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void save_csv(const TimeSeriesDataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write CSV '" + path.string() + "'");
    const bool ts = !dataset.timestamps().empty();
    if (ts) out << "timestamp";
    for (std::size_t i = 0; i < dataset.num_metrics(); ++i) {
        if (ts || i > 0) out << ',';
        out << dataset.names()[i];
    }
    out << '\n';
    for (std::size_t t = 0; t < dataset.length(); ++t) {
        if (ts) out << dataset.timestamps()[t];
        for (std::size_t i = 0; i < dataset.num_metrics(); ++i) {
            if (ts || i > 0) out << ',';
            out << format_double(dataset.values()[i][t]);
        }
        out << '\n';
    }
}

// Transforms --------------------------------------------------------------

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
    if (x.empty()) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size()));
}

Series rate_convert(std::span<const double> counts, std::span<const double> totals) {
    if (counts.size() != totals.size()) throw InvalidArgument("rate_convert: length mismatch");
    Series out(counts.size());
    for (std::size_t t = 0; t < counts.size(); ++t) {
        if (!(totals[t] > 0.0)) throw InvalidArgument("rate_convert: total must be positive at sample " + std::to_string(t));
        if (counts[t] < 0.0) throw InvalidArgument("rate_convert: negative count at sample " + std::to_string(t));
        if (counts[t] > totals[t]) throw InvalidArgument("rate_convert: count exceeds total at sample " + std::to_string(t));
        out[t] = counts[t] / totals[t];
    }
    return out;
}

Series normalize(std::span<const double> x) {
    if (x.size() < 2) throw InvalidArgument("normalize: need at least 2 samples");
    const double m = mean(x);
    const double s = stddev(x);
    Series out(x.size(), 0.0);
    // Relative cutoff so that floating noise on a constant series does not blow up.
    if (s <= 1e-12 * std::max(1.0, std::abs(m))) return out;
    for (std::size_t t = 0; t < x.size(); ++t) out[t] = (x[t] - m) / s;
    return out;
}

Series smooth(std::span<const double> x, std::size_t window) {
    if (window < 1 || window > x.size()) throw InvalidArgument("smooth: window must be in [1, length]");
    if (window == 1) return Series(x.begin(), x.end());
    Series out(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        const std::size_t first = t + 1 >= window ? t + 1 - window : 0;
        double sum = 0.0;
        for (std::size_t k = first; k <= t; ++k) sum += x[k];
        out[t] = sum / static_cast<double>(t - first + 1);
    }
    return out;
}

ShiftAlignment shift(std::span<const double> c, std::size_t steps) {
    if (steps >= c.size()) throw InvalidArgument("shift: steps must be smaller than the series length");
    return ShiftAlignment{steps, c.size() - steps};
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidArgument("pearson: length mismatch");
    if (a.size() < 2) throw InvalidArgument("pearson: need at least 2 samples");
    const double ma = mean(a);
    const double mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    const double n = static_cast<double>(a.size());
    const double scale_a = 1e-24 * std::max(1.0, ma * ma) * n;
    const double scale_b = 1e-24 * std::max(1.0, mb * mb) * n;
    if (saa <= scale_a || sbb <= scale_b) return 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace radice
