#include "radice/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "radice/error.hpp"

namespace radice {

namespace {

nlohmann::json candidate_to_json(const ScoredCandidate& c) {
    return nlohmann::json{{"metric", c.metric},     {"score", c.score.score}, {"corr", c.score.corr},
                          {"penalty", c.score.penalty}, {"width", c.score.width}, {"shift", c.score.shift}};
}

ScoredCandidate candidate_from_json(const nlohmann::json& j) {
    ScoredCandidate c;
    c.metric = j.at("metric").get<std::string>();
    c.score.score = j.at("score").get<double>();
    c.score.corr = j.at("corr").get<double>();
    c.score.penalty = j.at("penalty").get<double>();
    c.score.width = j.value("width", std::size_t{1});
    c.score.shift = j.value("shift", std::size_t{0});
    return c;
}

nlohmann::json list_to_json(const std::vector<ScoredCandidate>& list) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : list) a.push_back(candidate_to_json(c));
    return a;
}

std::vector<ScoredCandidate> list_from_json(const nlohmann::json& j) {
    std::vector<ScoredCandidate> out;
    for (const auto& c : j) out.push_back(candidate_from_json(c));
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw InvalidArgument("write failed for '" + path.string() + "'");
}

std::string fmt(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.1f", v);
    return buf.data();
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

struct Phases {
    std::size_t first = 0;  ///< original index of the slice's first sample
    std::size_t n = 0;
};

Phases phases_of(const RootCauseReport& report, const TimeSeriesDataset& analysed) {
    if (!report.window) throw InvalidArgument("plot: report has no anomaly window");
    const std::size_t n = report.window->n();
    if (analysed.length() != 3 * n) throw InvalidArgument("plot: analysed slice must hold 3n samples");
    return Phases{report.window->start - n, n};
}

const char* phase_name(std::size_t k, std::size_t n) {
    if (k < n) return "pre";
    if (k < 2 * n) return "anomaly";
    return "post";
}

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

nlohmann::json report_to_json(const RootCauseReport& report) {
    nlohmann::json j;
    j["target"] = report.target;
    j["root_causes"] = list_to_json(report.root_causes);
    j["intermediates"] = report.intermediates;
    j["filtered"] = {{"below_min_sim", list_to_json(report.below_min_sim)},
                     {"sign_rule", list_to_json(report.sign_rule)},
                     {"no_causal_path", list_to_json(report.no_causal_path)}};
    j["graph"] = graph_to_json(report.sub_graph);
    if (report.window) {
        j["window"] = {{"start", report.window->start}, {"end", report.window->end}};
    } else {
        j["window"] = nullptr;
    }
    j["warnings"] = report.warnings;
    return j;
}

RootCauseReport report_from_json(const nlohmann::json& j) {
    RootCauseReport r;
    try {
        r.target = j.at("target").get<std::string>();
        r.root_causes = list_from_json(j.at("root_causes"));
        r.intermediates = j.value("intermediates", std::vector<std::string>{});
        const auto& f = j.at("filtered");
        r.below_min_sim = list_from_json(f.at("below_min_sim"));
        r.sign_rule = list_from_json(f.at("sign_rule"));
        r.no_causal_path = list_from_json(f.at("no_causal_path"));
        r.sub_graph = graph_from_json(j.at("graph"));
        if (j.contains("window") && !j.at("window").is_null()) {
            r.window = AnomalyWindow{j.at("window").at("start").get<std::size_t>(),
                                     j.at("window").at("end").get<std::size_t>()};
        }
        r.warnings = j.value("warnings", std::vector<std::string>{});
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("report: ") + ex.what());
    }
    return r;
}

std::string report_to_dot(const RootCauseReport& report) {
    DotStyle style;
    for (const auto& c : report.root_causes) style.solid_nodes.insert(c.metric);
    style.dashed_nodes.insert(report.intermediates.begin(), report.intermediates.end());
    style.bold_nodes.insert(report.target);
    return graph_to_dot(report.sub_graph, style);
}

std::string plot_csv(const RootCauseReport& report, const TimeSeriesDataset& analysed) {
    const Phases ph = phases_of(report, analysed);
    std::string out = "metric,t,value,phase\n";
    for (const auto& metric : report.sub_graph.vertices()) {
        const auto s = analysed.series(metric);
        for (std::size_t k = 0; k < s.size(); ++k) {
            out += metric + ',' + std::to_string(ph.first + k) + ',' + format_double(s[k]) + ',' +
                   phase_name(k, ph.n) + '\n';
        }
    }
    return out;
}

std::string plot_svg(const RootCauseReport& report, const TimeSeriesDataset& analysed) {
    const Phases ph = phases_of(report, analysed);
    constexpr double kW = 1000, kH = 400, kLeft = 50, kRight = 200, kTop = 30, kBottom = 40;
    const double pw = kW - kLeft - kRight;
    const double phh = kH - kTop - kBottom;
    const std::size_t len = analysed.length();
    auto xpos = [&](double k) { return kLeft + pw * k / static_cast<double>(len - 1); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"400\" viewBox=\"0 0 1000 400\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"400\" fill=\"#ffffff\"/>\n";
    os << "<rect x=\"" << fmt(xpos(static_cast<double>(ph.n))) << "\" y=\"" << fmt(kTop) << "\" width=\""
       << fmt(xpos(static_cast<double>(2 * ph.n - 1)) - xpos(static_cast<double>(ph.n))) << "\" height=\""
       << fmt(phh) << "\" fill=\"#f4cccc\" fill-opacity=\"0.6\"/>\n";
    os << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\""
       << fmt(phh) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    os << "<text x=\"" << fmt(kLeft) << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
       << xml_escape(report.target) << " (scaled per metric)</text>\n";
    os << "<text x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kH - 15) << "\" font-family=\"sans-serif\" font-size=\"12\">t = "
       << ph.first << "</text>\n";
    os << "<text x=\"" << fmt(kLeft + pw) << "\" y=\"" << fmt(kH - 15)
       << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">t = " << ph.first + len - 1 << "</text>\n";

    const auto& metrics = report.sub_graph.vertices();
    for (std::size_t m = 0; m < metrics.size(); ++m) {
        const auto s = analysed.series(metrics[m]);
        const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        const double span = *hi - *lo;
        const char* color = kPalette[m % kPalette.size()];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
           << (metrics[m] == report.target ? "2.5" : "1.5") << "\" points=\"";
        for (std::size_t k = 0; k < s.size(); ++k) {
            const double u = span > 0 ? (s[k] - *lo) / span : 0.5;
            if (k) os << ' ';
            os << fmt(xpos(static_cast<double>(k))) << ',' << fmt(kTop + phh * (1.0 - u));
        }
        os << "\"/>\n";
        const double ly = kTop + 10 + 18 * static_cast<double>(m);
        os << "<line x1=\"" << fmt(kW - kRight + 15) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(kW - kRight + 35)
           << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << fmt(kW - kRight + 40) << "\" y=\"" << fmt(ly + 4)
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(metrics[m]) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string report_summary(const RootCauseReport& report) {
    std::ostringstream os;
    os << "target: " << report.target;
    if (report.window) os << "  window: [" << report.window->start << ", " << report.window->end << "]";
    os << '\n';
    if (report.root_causes.empty()) {
        os << "no root cause found\n";
    } else {
        os << "root causes:\n";
        for (const auto& c : report.root_causes) {
            std::array<char, 128> buf{};
            std::snprintf(buf.data(), buf.size(), "  %-24s score %.4f  corr %+.4f  (w=%zu, s=%zu)\n", c.metric.c_str(),
                          c.score.score, c.score.corr, c.score.width, c.score.shift);
            os << buf.data();
        }
    }
    if (!report.intermediates.empty()) {
        os << "intermediate metrics:";
        for (const auto& m : report.intermediates) os << ' ' << m;
        os << '\n';
    }
    auto filtered = [&](const std::vector<ScoredCandidate>& list, const char* reason) {
        for (const auto& c : list) {
            std::array<char, 128> buf{};
            std::snprintf(buf.data(), buf.size(), "  %-24s score %.4f  %s\n", c.metric.c_str(), c.score.score, reason);
            os << buf.data();
        }
    };
    if (!report.below_min_sim.empty() || !report.sign_rule.empty() || !report.no_causal_path.empty()) {
        os << "filtered candidates:\n";
        filtered(report.below_min_sim, "below min_sim");
        filtered(report.sign_rule, "violates sign rule");
        filtered(report.no_causal_path, "no causal path to target");
    }
    for (const auto& w : report.warnings) os << "warning: " << w << '\n';
    return os.str();
}

void write_diagnosis(const Diagnosis& diagnosis, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InvalidArgument("cannot create '" + dir.string() + "': " + ec.message());
    write_text(dir / "report.json", report_to_json(diagnosis.report).dump(2) + "\n");
    write_text(dir / "graph.dot", report_to_dot(diagnosis.report));
    write_text(dir / "plot.csv", plot_csv(diagnosis.report, diagnosis.analysed.dataset));
    write_text(dir / "plot.svg", plot_svg(diagnosis.report, diagnosis.analysed.dataset));
}

}  // namespace radice
