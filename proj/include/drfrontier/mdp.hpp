/**
 * @file mdp.hpp
 * @brief Maximum diversification-ratio portfolio and its distance to the
 *        maximum-DR objectives.
 *
 * The diversification ratio is sqrt(eta)^T w / sqrt(w^T V w). At a fixed
 * risk level its maximizer is the KKT solution with objective c = sqrt(eta).
 * For budget-feasible w,
 *
 *     eta^T w - (sqrt(eta)^T w)^2 = w^T D_eta w,
 *     D_eta = 1/2 (eta 1^T + 1 eta^T) - sqrt(eta) sqrt(eta)^T,
 *
 * with D_eta[i][j] = (sqrt(eta_i) - sqrt(eta_j))^2 / 2 an EDM. Over long-only
 * portfolios the two objectives therefore differ by at most
 * 2 d_max, d_max = max_{w in simplex} 1/2 w^T D_eta w.
 */
#pragma once

#include "drfrontier/frontiers.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace drfrontier {

inline MatrixXd build_d_eta(const VectorXd& eta) {
    if (eta.size() > 0 && eta.minCoeff() < 0.0) {
        throw Error(ErrorCode::NegativeVariance, "variance vector has a negative entry");
    }
    const VectorXd root = eta.cwiseSqrt();
    const Index n = eta.size();
    MatrixXd D(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double diff = root(i) - root(j);
            D(i, j) = 0.5 * diff * diff;
        }
    }
    return D;
}

inline MatrixXd build_d_eta(const AssetUniverse& u) { return build_d_eta(u.variances()); }

inline double diversification_ratio(const AssetUniverse& u, const VectorXd& w) {
    return u.variances().cwiseSqrt().dot(w) / std::sqrt(w.dot(u.covariance() * w));
}

/// Fixed-risk MDP: maximizes sqrt(eta)^T w on the budget hyperplane inside the
/// sigma-ellipsoid. Degenerate (w_mvp, flagged) when all volatilities are equal.
inline KktSolution mdp_at_sigma(const AssetUniverse& u, double sigma) {
    return max_linear_over_ellipsoid(u, u.variances().cwiseSqrt(), sigma);
}

struct MdpGlobal {
    Portfolio portfolio;
    double ratio = 0.0;
    /// Best ratio found along the fixed-risk MDP curve (scan + golden section).
    double sweep_ratio = 0.0;
    bool verified = false;
};

/**
 * Global maximizer of the diversification ratio on the budget hyperplane.
 *
 * Stationarity of the ratio gives w proportional to V^{-1} sqrt(eta). The
 * closed form is audited against the best ratio found along mdp_at_sigma;
 * `verified` records agreement within 1e-6 relative.
 */
inline MdpGlobal mdp_global(const AssetUniverse& u) {
    const VectorXd& eta = u.variances();
    if (!(eta.minCoeff() > 0.0)) {
        throw Error(ErrorCode::ZeroVariance, "every asset needs a positive variance");
    }
    const VectorXd root = eta.cwiseSqrt();
    const VectorXd x = u.solve(root);
    const double denom = x.sum();
    if (!(denom > 0.0)) {
        throw Error(ErrorCode::MdpUnbounded,
                    "1^T V^{-1} sqrt(eta) <= 0: the stationary point is not a maximizer");
    }
    MdpGlobal g;
    g.portfolio = portfolio_stats(u, x / denom);
    g.ratio = diversification_ratio(u, g.portfolio.weights);

    const double sm = std::sqrt(1.0 / u.solve(VectorXd::Ones(u.size())).sum());
    const double hi = std::max(3.0 * g.portfolio.sigma(), 2.0 * sm);
    auto ratio_at = [&](double sigma) {
        return diversification_ratio(u, mdp_at_sigma(u, sigma).weights);
    };
    constexpr int kScan = 400;
    double best_sigma = sm;
    double best = ratio_at(sm);
    for (int i = 1; i <= kScan; ++i) {
        const double s = sm + (hi - sm) * double(i) / kScan;
        const double r = ratio_at(s);
        if (r > best) {
            best = r;
            best_sigma = s;
        }
    }
    const double step = (hi - sm) / kScan;
    double lo_s = std::max(sm, best_sigma - step);
    double hi_s = std::min(hi, best_sigma + step);
    constexpr double kGolden = 0.6180339887498949;
    double c = hi_s - kGolden * (hi_s - lo_s);
    double d = lo_s + kGolden * (hi_s - lo_s);
    double fc = ratio_at(c);
    double fd = ratio_at(d);
    for (int it = 0; it < 200 && hi_s - lo_s > 1e-14 * hi; ++it) {
        if (fc > fd) {
            hi_s = d;
            d = c;
            fd = fc;
            c = hi_s - kGolden * (hi_s - lo_s);
            fc = ratio_at(c);
        } else {
            lo_s = c;
            c = d;
            fc = fd;
            d = lo_s + kGolden * (hi_s - lo_s);
            fd = ratio_at(d);
        }
    }
    g.sweep_ratio = std::max({best, fc, fd});
    g.verified = std::abs(g.sweep_ratio - g.ratio) <= 1e-6 * std::abs(g.ratio);
    return g;
}

struct DmaxBounds {
    double lower = 0.0; ///< best 1/2 w^T D_eta w found on the simplex
    double upper = 0.0; ///< 1/2 max_ij D_eta[i][j]
    VectorXd argmax;
    int starts_used = 0;
    bool converged = true; ///< false if any start hit the iteration cap
};

inline constexpr int kReplicatorMaxIter = 10000;
inline constexpr double kReplicatorStepTol = 1e-12;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Uniform draw from the probability simplex; stream k of the seed.
inline VectorXd dirichlet_draw(Index n, std::mt19937_64& rng) {
    std::gamma_distribution<double> gamma(1.0, 1.0);
    VectorXd w(n);
    for (Index i = 0; i < n; ++i) w(i) = gamma(rng);
    return w / w.sum();
}

struct AscentResult {
    VectorXd w;
    double value = 0.0;
    bool converged = true;
};

/// Replicator dynamics w_i <- w_i (D w)_i / (w^T D w); stays on the simplex
/// and never decreases w^T D w for nonnegative symmetric D.
inline AscentResult replicator_ascent(const MatrixXd& D, VectorXd w) {
    AscentResult r;
    for (int it = 0; it < kReplicatorMaxIter; ++it) {
        const VectorXd Dw = D * w;
        const double val = w.dot(Dw);
        if (!(val > 0.0)) {
            r.w = w;
            r.value = 0.5 * std::max(val, 0.0);
            return r;
        }
        VectorXd next = w.cwiseProduct(Dw) / val;
        next /= next.sum();
        const double step = (next - w).cwiseAbs().maxCoeff();
        w = std::move(next);
        if (step < kReplicatorStepTol) {
            r.w = w;
            r.value = 0.5 * w.dot(D * w);
            return r;
        }
    }
    r.w = w;
    r.value = 0.5 * w.dot(D * w);
    r.converged = false;
    return r;
}

}  // namespace detail

/**
 * Bounds on d_max = max 1/2 w^T D_eta w over the simplex.
 *
 * Lower bound: multi-start replicator ascent from every vertex, every edge
 * midpoint and `starts` Dirichlet draws; draw k uses its own RNG stream so
 * adding starts never changes earlier ones. Upper bound: 1/2 max_ij D_eta.
 */
inline DmaxBounds d_max_bounds(const MatrixXd& d_eta, int starts, std::uint64_t seed) {
    const Index n = d_eta.rows();
    DmaxBounds b;
    b.upper = 0.5 * d_eta.maxCoeff();
    b.argmax = VectorXd::Zero(n);
    if (n > 0) b.argmax(0) = 1.0;
    b.lower = 0.0;

    auto consider = [&](detail::AscentResult r) {
        ++b.starts_used;
        b.converged = b.converged && r.converged;
        if (r.value > b.lower) {
            b.lower = r.value;
            b.argmax = std::move(r.w);
        }
    };
    for (Index i = 0; i < n; ++i) {
        VectorXd v = VectorXd::Zero(n);
        v(i) = 1.0;
        consider(detail::replicator_ascent(d_eta, std::move(v)));
    }
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            VectorXd v = VectorXd::Zero(n);
            v(i) = 0.5;
            v(j) = 0.5;
            consider(detail::replicator_ascent(d_eta, std::move(v)));
        }
    }
    for (int k = 0; k < starts; ++k) {
        std::mt19937_64 rng(detail::splitmix64(seed ^ detail::splitmix64(std::uint64_t(k))));
        consider(detail::replicator_ascent(d_eta, detail::dirichlet_draw(n, rng)));
    }
    b.lower = std::min(b.lower, b.upper);
    return b;
}

struct SandwichReport {
    double sigma = 0.0;
    std::size_t requested = 0;
    std::size_t accepted = 0;
    std::size_t attempts = 0;
    double max_eta_w = 0.0;          ///< max eta^T w over accepted samples
    double max_sqrt_eta_w_sq = 0.0;  ///< max (sqrt(eta)^T w)^2 over accepted samples
    double gap = 0.0;                ///< max_eta_w - max_sqrt_eta_w_sq
    double bound = 0.0;              ///< 2 d_max_upper
    bool empty = false;              ///< no long-only sample landed in the sigma band
    bool holds = false;              ///< 0 <= gap <= bound (meaningless when empty)
};

/**
 * Samples long-only portfolios whose volatility lies within 1% of sigma and
 * checks max (sqrt(eta)^T w)^2 <= max eta^T w <= max (sqrt(eta)^T w)^2 + 2 d_max.
 * Stops after `samples` accepted points or 1000 * samples attempts.
 */
inline SandwichReport sandwich_check(const AssetUniverse& u, double sigma, std::size_t samples,
                                     std::uint64_t seed, double d_max_upper) {
    SandwichReport rep;
    rep.sigma = sigma;
    rep.requested = samples;
    rep.bound = 2.0 * d_max_upper;
    const Index n = u.size();
    const VectorXd& eta = u.variances();
    const VectorXd root = eta.cwiseSqrt();
    std::mt19937_64 rng(detail::splitmix64(seed));
    const std::size_t cap = std::max<std::size_t>(1000 * samples, 1000);
    bool any = false;
    while (rep.accepted < samples && rep.attempts < cap) {
        ++rep.attempts;
        const VectorXd w = detail::dirichlet_draw(n, rng);
        const double sd = std::sqrt(w.dot(u.covariance() * w));
        if (std::abs(sd / sigma - 1.0) > 0.01) continue;
        ++rep.accepted;
        const double lin = eta.dot(w);
        const double sq = root.dot(w) * root.dot(w);
        if (!any || lin > rep.max_eta_w) rep.max_eta_w = lin;
        if (!any || sq > rep.max_sqrt_eta_w_sq) rep.max_sqrt_eta_w_sq = sq;
        any = true;
    }
    rep.empty = !any;
    if (any) {
        rep.gap = rep.max_eta_w - rep.max_sqrt_eta_w_sq;
        const double slack = 1e-12 * std::max(1.0, rep.max_eta_w);
        rep.holds = rep.gap >= -slack && rep.gap <= rep.bound + slack;
    }
    return rep;
}

/// All mdp outputs for one universe.
struct MdpAnalysis {
    std::optional<MdpGlobal> global;
    std::vector<std::string> notes;
    MatrixXd d_eta;
    DmaxBounds d_max;
    std::vector<SandwichReport> sandwich;
};

inline MdpAnalysis analyze_mdp(const AssetUniverse& u, int starts, std::uint64_t seed,
                               const std::vector<double>& sandwich_sigmas,
                               std::size_t samples) {
    MdpAnalysis a;
    try {
        a.global = mdp_global(u);
    } catch (const Error& e) {
        a.notes.emplace_back(e.what());
    }
    a.d_eta = build_d_eta(u);
    a.d_max = d_max_bounds(a.d_eta, starts, seed);
    for (std::size_t i = 0; i < sandwich_sigmas.size(); ++i) {
        a.sandwich.push_back(
            sandwich_check(u, sandwich_sigmas[i], samples, seed + 1 + i, a.d_max.upper));
    }
    return a;
}

}  // namespace drfrontier
