#include "radice/refinement.hpp"

#include <algorithm>
#include <cmath>

#include "radice/error.hpp"

namespace radice {

void RefinementConfig::validate() const {
    if (max_width < 1) throw InvalidArgument("refinement: max_width must be >= 1");
    if (!(shift_penalty >= 0.0) || !(smooth_penalty >= 0.0)) throw InvalidArgument("refinement: penalties must be >= 0");
    if (!(min_sim >= 0.0 && min_sim <= 1.0)) throw InvalidArgument("refinement: min_sim must lie in [0, 1]");
}

RefinementConfig RefinementConfig::pearson_only(double min_sim) {
    RefinementConfig c;
    c.max_shift = 0;
    c.max_width = 1;
    c.min_sim = min_sim;
    return c;
}

AdjustedScore adjusted_score(std::span<const double> x, std::span<const double> c, const RefinementConfig& config) {
    config.validate();
    if (x.size() != c.size()) throw InvalidArgument("adjusted_score: length mismatch");
    if (x.size() < config.max_width + config.max_shift + 2) throw InvalidArgument("adjusted_score: series too short");

    const Series xn = normalize(x);
    const Series cn = normalize(c);
    AdjustedScore best;
    bool have = false;
    for (std::size_t w = 1; w <= config.max_width; ++w) {
        const Series xs = smooth(xn, w);
        const Series cs = smooth(cn, w);
        const double smooth_pen = config.smooth_penalty * static_cast<double>(w - 1);
        for (std::size_t s = 0; s <= config.max_shift; ++s) {
            const ShiftAlignment align = shift(cs, s);
            const double penalty = smooth_pen + config.shift_penalty * static_cast<double>(s);
            const double corr = pearson(align.later(xs), align.earlier(cs));
            const double score = std::abs(corr) - penalty;
            // Strict comparisons keep the earliest (smallest w, s) cell on full ties.
            if (!have || score > best.score || (score == best.score && penalty < best.penalty)) {
                best = AdjustedScore{score, corr, penalty, w, s};
                have = true;
            }
        }
    }
    return best;
}

RefinementResult refine(const DiagnosticInput& input, const DomainKnowledgeModel& dk, const RefinementConfig& config) {
    config.validate();
    RefinementResult result;
    const auto x = input.target_series();
    auto candidates = input.candidates();
    std::sort(candidates.begin(), candidates.end());
    for (const auto& name : candidates) {
        ScoredCandidate sc{name, adjusted_score(x, input.dataset.series(name), config)};
        if (sc.score.score < config.min_sim) {
            result.below_min_sim.push_back(std::move(sc));
        } else if (!sign_permits(dk, name, sc.score.corr)) {
            result.sign_rule.push_back(std::move(sc));
        } else {
            result.root_causes.push_back(std::move(sc));
        }
    }
    return result;
}

}  // namespace radice
