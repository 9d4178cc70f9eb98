#include "radice/entropy_orientation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "radice/error.hpp"

namespace radice {

void EntropyConfig::validate() const {
    if (bins < 2) throw InvalidArgument("entropy: bins must be >= 2");
    if (!(min_gap >= 0.0)) throw InvalidArgument("entropy: min_gap must be >= 0");
}

double entropy_bits(std::span<const double> p) {
    double h = 0.0;
    for (double q : p) {
        if (q > 0.0) h -= q * std::log2(q);
    }
    return h;
}

std::vector<double> greedy_coupling(std::vector<std::vector<double>> marginals) {
    std::vector<double> atoms;
    if (marginals.empty()) return atoms;
    constexpr double kEps = 1e-12;
    for (auto& m : marginals) std::sort(m.begin(), m.end(), std::greater<>());
    double remaining = 1.0;
    while (remaining > kEps) {
        double r = std::numeric_limits<double>::infinity();
        for (const auto& m : marginals) r = std::min(r, m.front());
        if (!(r > kEps)) break;
        atoms.push_back(r);
        remaining -= r;
        for (auto& m : marginals) {
            m.front() -= r;
            // Restore descending order by sinking the reduced head.
            for (std::size_t i = 0; i + 1 < m.size() && m[i] < m[i + 1]; ++i) std::swap(m[i], m[i + 1]);
        }
    }
    return atoms;
}

double greedy_coupling_entropy(const std::vector<std::vector<double>>& marginals) {
    const auto atoms = greedy_coupling(marginals);
    return entropy_bits(atoms);
}

double causal_entropy(const JointTable& joint) {
    std::vector<double> cause;
    std::vector<std::vector<double>> conditionals;
    for (const auto& row : joint) {
        const double mass = std::accumulate(row.begin(), row.end(), 0.0);
        cause.push_back(mass);
        if (mass <= 0.0) continue;
        std::vector<double> cond(row.size());
        for (std::size_t j = 0; j < row.size(); ++j) cond[j] = row[j] / mass;
        conditionals.push_back(std::move(cond));
    }
    return entropy_bits(cause) + greedy_coupling_entropy(conditionals);
}

namespace {

JointTable transpose(const JointTable& joint) {
    if (joint.empty()) return {};
    JointTable out(joint.front().size(), std::vector<double>(joint.size()));
    for (std::size_t i = 0; i < joint.size(); ++i) {
        for (std::size_t j = 0; j < joint[i].size(); ++j) out[j][i] = joint[i][j];
    }
    return out;
}

std::size_t occupied(const std::vector<int>& bins) {
    std::vector<int> b = bins;
    std::sort(b.begin(), b.end());
    return static_cast<std::size_t>(std::unique(b.begin(), b.end()) - b.begin());
}

}  // namespace

OrientationVerdict orient_joint(const JointTable& joint, double min_gap) {
    OrientationVerdict v;
    v.forward_entropy = causal_entropy(joint);
    v.backward_entropy = causal_entropy(transpose(joint));
    v.score = std::abs(v.forward_entropy - v.backward_entropy);
    if (v.score < min_gap || v.score == 0.0) {
        v.direction = Direction::Inconclusive;
    } else {
        v.direction = v.forward_entropy < v.backward_entropy ? Direction::Forward : Direction::Backward;
    }
    return v;
}

std::vector<int> quantile_bins(std::span<const double> x, int bins) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<int> out(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const int bin = static_cast<int>((i * static_cast<std::size_t>(bins)) / n);
        for (std::size_t k = i; k <= j; ++k) out[order[k]] = bin;
        i = j + 1;
    }
    return out;
}

OrientationVerdict orient_pair(std::span<const double> u, std::span<const double> v, const EntropyConfig& config) {
    config.validate();
    if (u.size() != v.size()) throw InvalidArgument("orient_pair: length mismatch");
    if (u.size() < 3 * static_cast<std::size_t>(config.bins)) {
        throw InvalidArgument("orient_pair: need at least 3 * bins samples");
    }
    const auto bu = quantile_bins(u, config.bins);
    const auto bv = quantile_bins(v, config.bins);
    if (occupied(bu) < 2 || occupied(bv) < 2) return OrientationVerdict{};

    const auto nb = static_cast<std::size_t>(config.bins);
    JointTable joint(nb, std::vector<double>(nb, 0.0));
    for (std::size_t t = 0; t < u.size(); ++t) joint[static_cast<std::size_t>(bu[t])][static_cast<std::size_t>(bv[t])] += 1.0;
    const double n = static_cast<double>(u.size());
    for (auto& row : joint) {
        for (double& c : row) c /= n;
    }
    return orient_joint(joint, config.min_gap);
}

EntropyOrientationResult entropy_orientation(const std::vector<UndirectedEdge>& pairs, const CausalGraph& partial,
                                             const TimeSeriesDataset& dataset, const EntropyConfig& config) {
    config.validate();
    EntropyOrientationResult result;
    std::vector<OrientedEdge> conclusive;
    for (const auto& pair : pairs) {
        const std::string& a = partial.name(pair.a);
        const std::string& b = partial.name(pair.b);
        OrientationVerdict verdict;
        try {
            verdict = orient_pair(dataset.series(a), dataset.series(b), config);
        } catch (const Error& e) {
            result.log.push_back("entropy orientation of " + a + " - " + b + " inconclusive: " + e.what());
            result.inconclusive.push_back(pair);
            continue;
        }
        if (verdict.direction == Direction::Inconclusive) {
            result.inconclusive.push_back(pair);
            continue;
        }
        const bool forward = verdict.direction == Direction::Forward;
        conclusive.push_back({forward ? pair.a : pair.b, forward ? pair.b : pair.a, verdict.score});
    }

    std::sort(conclusive.begin(), conclusive.end(), [&](const OrientedEdge& x, const OrientedEdge& y) {
        if (x.score != y.score) return x.score > y.score;
        const auto& xf = partial.name(x.from);
        const auto& yf = partial.name(y.from);
        if (xf != yf) return xf < yf;
        return partial.name(x.to) < partial.name(y.to);
    });

    CausalGraph working = partial;
    for (const auto& e : conclusive) {
        working.remove_undirected(e.from, e.to);
        if (working.try_add_directed(e.from, e.to, 0)) {
            result.inserted.push_back(e);
        } else {
            result.rejected_cycle.push_back(e);
            result.log.push_back("discarded " + partial.name(e.from) + "->" + partial.name(e.to) +
                                 ": would create a contemporaneous cycle");
        }
    }
    return result;
}

}  // namespace radice
