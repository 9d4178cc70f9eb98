#include "radice/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "radice/error.hpp"

namespace radice {

// Rank transform ------------------------------------------------------------

Series normal_scores(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    Series ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    const boost::math::normal_distribution<double> unit;
    Series out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = boost::math::quantile(unit, ranks[i] / (static_cast<double>(n) + 1.0));
    }
    return out;
}

// Partial correlation ---------------------------------------------------------

namespace {

Eigen::VectorXd residualize(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, bool& singular) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols()) {
        singular = true;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
        return y - design * cod.solve(y);
    }
    return y - design * qr.solve(y);
}

}  // namespace

CITestResult partial_correlation_test(const std::vector<Series>& data, VarLag x, VarLag y, std::span<const VarLag> z) {
    if (data.empty()) throw InvalidArgument("ci_test: empty dataset");
    const std::size_t len = data.front().size();
    int max_lag = std::max(x.lag, y.lag);
    for (const auto& v : z) max_lag = std::max(max_lag, v.lag);
    auto check = [&](const VarLag& v) {
        if (v.var >= data.size()) throw InvalidArgument("ci_test: variable index out of range");
        if (v.lag < 0) throw InvalidArgument("ci_test: negative lag");
    };
    check(x);
    check(y);
    for (const auto& v : z) check(v);
    if (static_cast<std::size_t>(max_lag) >= len || len - static_cast<std::size_t>(max_lag) < z.size() + 3) {
        throw InvalidArgument("ci_test: insufficient samples after lag alignment");
    }
    const std::size_t n = len - static_cast<std::size_t>(max_lag);
    auto column = [&](const VarLag& v) {
        Eigen::VectorXd col(static_cast<Eigen::Index>(n));
        const auto& s = data[v.var];
        for (std::size_t t = 0; t < n; ++t) col[static_cast<Eigen::Index>(t)] = s[t + static_cast<std::size_t>(max_lag - v.lag)];
        return col;
    };

    CITestResult result;
    result.conditioning_set.assign(z.begin(), z.end());
    Eigen::VectorXd rx = column(x);
    Eigen::VectorXd ry = column(y);
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(z.size() + 1));
    design.col(0).setOnes();
    for (std::size_t k = 0; k < z.size(); ++k) design.col(static_cast<Eigen::Index>(k + 1)) = column(z[k]);
    rx = residualize(design, rx, result.singular);
    ry = residualize(design, ry, result.singular);

    const double sxx = rx.squaredNorm();
    const double syy = ry.squaredNorm();
    double r = 0.0;
    if (sxx > 1e-14 * static_cast<double>(n) && syy > 1e-14 * static_cast<double>(n)) {
        r = std::clamp(rx.dot(ry) / std::sqrt(sxx * syy), -1.0, 1.0);
    }
    result.statistic = r;
    const double dof = static_cast<double>(n) - 2.0 - static_cast<double>(z.size());
    if (dof < 1.0) {
        result.p_value = 1.0;
        return result;
    }
    if (std::abs(r) >= 1.0 - 1e-15) {
        result.p_value = 0.0;
        return result;
    }
    const double t = r * std::sqrt(dof / (1.0 - r * r));
    const boost::math::students_t_distribution<double> dist(dof);
    result.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
    return result;
}

RobustParCorr::RobustParCorr(const TimeSeriesDataset& dataset) {
    scores_.reserve(dataset.num_metrics());
    for (const auto& s : dataset.values()) scores_.push_back(normal_scores(s));
}

CITestResult RobustParCorr::test(VarLag x, VarLag y, std::span<const VarLag> z) const {
    // Partial correlation is symmetric in (x, y) and in the order of z.
    std::vector<VarLag> zs(z.begin(), z.end());
    std::sort(zs.begin(), zs.end());
    if (y < x) std::swap(x, y);
    std::vector<int> key;
    key.reserve(4 + 2 * zs.size());
    key.push_back(static_cast<int>(x.var));
    key.push_back(x.lag);
    key.push_back(static_cast<int>(y.var));
    key.push_back(y.lag);
    for (const auto& v : zs) {
        key.push_back(static_cast<int>(v.var));
        key.push_back(v.lag);
    }
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    ++tests_run_;
    auto result = partial_correlation_test(scores_, x, y, zs);
    result.conditioning_set.assign(z.begin(), z.end());
    cache_.emplace(std::move(key), result);
    return result;
}

CITestResult ci_test(const TimeSeriesDataset& dataset, VarLag x, VarLag y, std::span<const VarLag> z) {
    std::vector<Series> scores;
    for (const auto& s : dataset.values()) scores.push_back(normal_scores(s));
    return partial_correlation_test(scores, x, y, z);
}

void DiscoveryConfig::validate() const {
    if (tau_max < 0) throw InvalidArgument("discovery: tau_max must be >= 0");
    auto check_alpha = [](double a) {
        if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("discovery: alpha values must lie in (0, 1)");
    };
    if (fixed_alpha) {
        check_alpha(*fixed_alpha);
    } else {
        if (alpha_grid.empty()) throw InvalidArgument("discovery: empty alpha grid");
        for (double a : alpha_grid) check_alpha(a);
    }
    if (ci_test != "robust_parcorr") throw InvalidArgument("discovery: unknown ci test '" + ci_test + "'");
    if (max_conds < 0) throw InvalidArgument("discovery: max_conds must be >= 0");
    if (max_combinations < 1) throw InvalidArgument("discovery: max_combinations must be >= 1");
}

// Skeleton --------------------------------------------------------------------

namespace {

/// PC1-style lagged parent screening for one target variable.
std::set<VarLag> screen_lagged_parents(std::size_t j, std::size_t num_vars, const IndependenceTest& test, int tau_max,
                                       double alpha) {
    struct Candidate {
        VarLag link;
        double strength = std::numeric_limits<double>::infinity();
    };
    std::vector<Candidate> parents;
    for (int tau = 1; tau <= tau_max; ++tau) {
        for (std::size_t i = 0; i < num_vars; ++i) parents.push_back({VarLag{i, tau}});
    }
    const VarLag target{j, 0};
    for (std::size_t p = 0; !parents.empty() && p + 1 <= parents.size(); ++p) {
        std::vector<char> keep(parents.size(), 1);
        for (std::size_t c = 0; c < parents.size(); ++c) {
            std::vector<VarLag> z;
            for (std::size_t o = 0; o < parents.size() && z.size() < p; ++o) {
                if (o != c) z.push_back(parents[o].link);
            }
            if (z.size() < p) continue;
            const auto r = test.test(parents[c].link, target, z);
            if (r.p_value > alpha) {
                keep[c] = 0;
            } else {
                parents[c].strength = std::min(parents[c].strength, std::abs(r.statistic));
            }
        }
        std::vector<Candidate> next;
        for (std::size_t c = 0; c < parents.size(); ++c) {
            if (keep[c]) next.push_back(parents[c]);
        }
        std::stable_sort(next.begin(), next.end(),
                         [](const Candidate& a, const Candidate& b) { return a.strength > b.strength; });
        parents = std::move(next);
    }
    std::set<VarLag> out;
    for (const auto& c : parents) out.insert(c.link);
    return out;
}

/// Calls f(subset) for each size-k subset of `items` in lexicographic order,
/// stopping after `limit` subsets or when f returns false.
template <class F>
void for_each_subset(const std::vector<std::size_t>& items, std::size_t k, int limit, F&& f) {
    if (k > items.size()) return;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    int produced = 0;
    while (true) {
        std::vector<std::size_t> subset(k);
        for (std::size_t i = 0; i < k; ++i) subset[i] = items[idx[i]];
        if (!f(subset) || ++produced >= limit) return;
        if (k == 0) return;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == items.size() - k + (i - 1)) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t m = i; m < k; ++m) idx[m] = idx[m - 1] + 1;
    }
}

}  // namespace

Skeleton discover_skeleton(std::size_t num_vars, const IndependenceTest& test, int tau_max, double alpha,
                           int max_conds, int max_combinations) {
    Skeleton sk;
    sk.num_vars = num_vars;
    sk.tau_max = tau_max;

    std::vector<std::set<VarLag>> lagged(num_vars);
    for (std::size_t j = 0; j < num_vars; ++j) lagged[j] = screen_lagged_parents(j, num_vars, test, tau_max, alpha);

    // Stage 2: every surviving lagged link plus all contemporaneous pairs,
    // conditioned on lagged parents of both ends and subsets of the target's
    // contemporaneous adjacencies (PC-stable within a subset size).
    std::vector<std::set<VarLag>> adj(num_vars);
    for (std::size_t j = 0; j < num_vars; ++j) {
        adj[j] = lagged[j];
        for (std::size_t i = 0; i < num_vars; ++i) {
            if (i != j) adj[j].insert(VarLag{i, 0});
        }
    }

    for (int p = 0; p <= max_conds; ++p) {
        const auto frozen = adj;
        bool tested_any = false;
        for (std::size_t j = 0; j < num_vars; ++j) {
            for (const VarLag& link : frozen[j]) {
                if (!adj[j].contains(link)) continue;
                std::vector<std::size_t> contemp;
                for (const VarLag& other : frozen[j]) {
                    if (other.lag == 0 && !(link.lag == 0 && other.var == link.var)) contemp.push_back(other.var);
                }
                if (contemp.size() < static_cast<std::size_t>(p)) continue;
                tested_any = true;

                std::set<VarLag> base;
                for (const VarLag& b : lagged[j]) {
                    if (!(b == link)) base.insert(b);
                }
                for (const VarLag& b : lagged[link.var]) base.insert(VarLag{b.var, b.lag + link.lag});
                base.erase(link);
                base.erase(VarLag{j, 0});

                for_each_subset(contemp, static_cast<std::size_t>(p), max_combinations,
                                [&](const std::vector<std::size_t>& subset) {
                                    std::set<VarLag> zset = base;
                                    for (std::size_t k : subset) zset.insert(VarLag{k, 0});
                                    const std::vector<VarLag> z(zset.begin(), zset.end());
                                    const auto r = test.test(link, VarLag{j, 0}, z);
                                    if (r.p_value <= alpha) return true;
                                    adj[j].erase(link);
                                    sk.sepsets[{link, j}] = subset;
                                    if (link.lag == 0) {
                                        adj[link.var].erase(VarLag{j, 0});
                                        sk.sepsets[{VarLag{j, 0}, link.var}] = subset;
                                    }
                                    return false;
                                });
            }
        }
        if (!tested_any) break;
    }

    sk.lagged_parents.resize(num_vars);
    for (std::size_t j = 0; j < num_vars; ++j) {
        for (const VarLag& link : adj[j]) {
            if (link.lag > 0) {
                sk.lagged_parents[j].insert(link);
            } else if (link.var < j) {
                sk.contemporaneous.insert({link.var, j});
            }
        }
    }
    return sk;
}

// Orientation -------------------------------------------------------------------

namespace {

class OrientationState {
public:
    explicit OrientationState(const Skeleton& sk) : sk_(sk), n_(sk.num_vars) {
        for (const auto& [a, b] : sk.contemporaneous) undirected_.insert({a, b});
    }

    bool adjacent(std::size_t a, std::size_t b) const {
        if (a == b) return false;
        return undirected_.contains(key(a, b)) || directed_.contains({a, b}) || directed_.contains({b, a});
    }
    bool is_undirected(std::size_t a, std::size_t b) const { return a != b && undirected_.contains(key(a, b)); }
    bool is_directed(std::size_t a, std::size_t b) const { return directed_.contains({a, b}); }

    /// Orients a-b as a->b unless that closes a lag-0 cycle.
    bool orient(std::size_t a, std::size_t b) {
        if (!is_undirected(a, b)) return false;
        if (reachable(b, a)) return false;
        undirected_.erase(key(a, b));
        directed_.insert({a, b});
        return true;
    }

    std::vector<std::size_t> undirected_neighbours(std::size_t v) const {
        std::vector<std::size_t> out;
        for (std::size_t w = 0; w < n_; ++w) {
            if (is_undirected(v, w)) out.push_back(w);
        }
        return out;
    }

    const std::set<std::pair<std::size_t, std::size_t>>& directed() const { return directed_; }
    const std::set<std::pair<std::size_t, std::size_t>>& undirected() const { return undirected_; }

private:
    static std::pair<std::size_t, std::size_t> key(std::size_t a, std::size_t b) {
        return {std::min(a, b), std::max(a, b)};
    }

    bool reachable(std::size_t from, std::size_t to) const {
        if (from == to) return true;
        std::vector<char> seen(n_, 0);
        std::vector<std::size_t> stack{from};
        seen[from] = 1;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (auto it = directed_.lower_bound({v, 0}); it != directed_.end() && it->first == v; ++it) {
                if (it->second == to) return true;
                if (!seen[it->second]) {
                    seen[it->second] = 1;
                    stack.push_back(it->second);
                }
            }
        }
        return false;
    }

    const Skeleton& sk_;
    std::size_t n_;
    std::set<std::pair<std::size_t, std::size_t>> undirected_;
    std::set<std::pair<std::size_t, std::size_t>> directed_;
};

bool in_sepset(const Skeleton& sk, VarLag source, std::size_t target, std::size_t k) {
    auto it = sk.sepsets.find({source, target});
    if (it == sk.sepsets.end()) return false;
    return std::find(it->second.begin(), it->second.end(), k) != it->second.end();
}

}  // namespace

CausalGraph orient_skeleton(const Skeleton& sk, const std::vector<std::string>& names, bool include_self_lags) {
    if (names.size() != sk.num_vars) throw InvalidArgument("orient_skeleton: name count mismatch");
    const std::size_t n = sk.num_vars;
    OrientationState state(sk);

    // Collider phase: collect arrowhead votes, then apply those without conflict.
    std::set<std::pair<std::size_t, std::size_t>> votes;
    for (std::size_t k = 0; k < n; ++k) {
        const auto nb = state.undirected_neighbours(k);
        for (std::size_t a = 0; a < nb.size(); ++a) {
            for (std::size_t b = a + 1; b < nb.size(); ++b) {
                const std::size_t i = nb[a];
                const std::size_t j = nb[b];
                if (state.adjacent(i, j)) continue;
                if (!in_sepset(sk, VarLag{i, 0}, j, k)) {
                    votes.insert({i, k});
                    votes.insert({j, k});
                }
            }
        }
        for (const VarLag& lp : sk.lagged_parents[k]) {
            for (std::size_t j : nb) {
                if (sk.lagged_parents[j].contains(lp)) continue;
                if (!in_sepset(sk, lp, j, k)) votes.insert({j, k});
            }
        }
    }
    for (const auto& [a, b] : votes) {
        if (!votes.contains({b, a})) state.orient(a, b);
    }

    // Meek rules 1-3 until fixpoint.
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j : state.undirected_neighbours(k)) {
                // R1: i -> k - j with i, j non-adjacent (i may be lagged).
                bool r1 = false;
                for (std::size_t i = 0; i < n && !r1; ++i) {
                    if (i != j && state.is_directed(i, k) && !state.adjacent(i, j)) r1 = true;
                }
                for (const VarLag& lp : sk.lagged_parents[k]) {
                    if (r1) break;
                    if (!sk.lagged_parents[j].contains(lp)) r1 = true;
                }
                if (r1 && state.orient(k, j)) {
                    changed = true;
                    continue;
                }
                // R2: k -> m -> j with k - j.
                bool r2 = false;
                for (std::size_t m = 0; m < n && !r2; ++m) {
                    if (state.is_directed(k, m) && state.is_directed(m, j)) r2 = true;
                }
                if (r2 && state.orient(k, j)) {
                    changed = true;
                    continue;
                }
                // R3: k - m1 -> j, k - m2 -> j, m1 and m2 non-adjacent.
                const auto knb = state.undirected_neighbours(k);
                bool r3 = false;
                for (std::size_t a = 0; a < knb.size() && !r3; ++a) {
                    for (std::size_t b = a + 1; b < knb.size() && !r3; ++b) {
                        const std::size_t m1 = knb[a];
                        const std::size_t m2 = knb[b];
                        if (m1 == j || m2 == j) continue;
                        if (state.is_directed(m1, j) && state.is_directed(m2, j) && !state.adjacent(m1, m2)) r3 = true;
                    }
                }
                if (r3 && state.orient(k, j)) changed = true;
            }
        }
    }

    CausalGraph g(names);
    for (const auto& [a, b] : state.directed()) g.add_directed(a, b, 0);
    for (const auto& [a, b] : state.undirected()) g.add_undirected(a, b);
    for (std::size_t j = 0; j < n; ++j) {
        for (const VarLag& lp : sk.lagged_parents[j]) {
            if (lp.var == j && !include_self_lags) continue;
            g.add_directed(lp.var, j, lp.lag);
        }
    }
    return g;
}

// Model selection ----------------------------------------------------------------

double graph_bic(const CausalGraph& g, const Skeleton& sk, const std::vector<Series>& data) {
    if (data.empty()) return 0.0;
    const std::size_t len = data.front().size();
    const int tau = sk.tau_max;
    if (static_cast<std::size_t>(tau) >= len) throw InvalidArgument("graph_bic: series shorter than tau_max");
    const std::size_t n = len - static_cast<std::size_t>(tau);
    const double nd = static_cast<double>(n);

    double total = 0.0;
    for (std::size_t j = 0; j < sk.num_vars; ++j) {
        std::set<VarLag> parents = sk.lagged_parents[j];
        for (const auto& e : g.directed()) {
            if (e.to == j && e.lag == 0) parents.insert(VarLag{e.from, 0});
        }
        for (const auto& e : g.undirected()) {
            if (e.a == j) parents.insert(VarLag{e.b, 0});
            if (e.b == j) parents.insert(VarLag{e.a, 0});
        }
        Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(parents.size() + 1));
        Eigen::VectorXd y(static_cast<Eigen::Index>(n));
        design.col(0).setOnes();
        for (std::size_t t = 0; t < n; ++t) y[static_cast<Eigen::Index>(t)] = data[j][t + static_cast<std::size_t>(tau)];
        Eigen::Index c = 1;
        for (const VarLag& p : parents) {
            for (std::size_t t = 0; t < n; ++t) {
                design(static_cast<Eigen::Index>(t), c) = data[p.var][t + static_cast<std::size_t>(tau - p.lag)];
            }
            ++c;
        }
        bool singular = false;
        const Eigen::VectorXd resid = residualize(design, y, singular);
        const double rss = std::max(resid.squaredNorm() / nd, 1e-300);
        total += nd * std::log(rss) + static_cast<double>(parents.size() + 1) * std::log(nd);
    }
    return total;
}

DiscoveryResult discover(const TimeSeriesDataset& dataset, const DiscoveryConfig& config) {
    config.validate();
    const std::size_t len = dataset.length();
    const std::size_t tau = static_cast<std::size_t>(config.tau_max);
    if (dataset.num_metrics() == 0) throw InvalidArgument("discover: empty dataset");
    if (len <= tau || len - tau < 3) throw InvalidArgument("discover: dataset too short for any test");

    RobustParCorr test(dataset);
    std::vector<double> grid = config.fixed_alpha ? std::vector<double>{*config.fixed_alpha} : config.alpha_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    DiscoveryResult best;
    bool have_best = false;
    for (double alpha : grid) {
        const Skeleton sk =
            discover_skeleton(dataset.num_metrics(), test, config.tau_max, alpha, config.max_conds, config.max_combinations);
        CausalGraph g = orient_skeleton(sk, dataset.names(), config.include_self_lags);
        const double bic = grid.size() == 1 ? 0.0 : graph_bic(g, sk, test.transformed());
        if (!have_best || bic < best.bic) {
            best.graph = std::move(g);
            best.alpha = alpha;
            best.bic = bic;
            have_best = true;
        }
    }
    best.low_sample_warning = len < 10 * (tau + 1);
    best.tests_run = test.tests_run();
    return best;
}

}  // namespace radice
