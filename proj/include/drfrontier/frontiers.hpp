/**
 * @file frontiers.hpp
 * @brief Efficient DR frontier, DR curve of MV-efficient portfolios, risk-free
 *        variants, and the generic KKT engine behind them.
 *
 * Let s(sigma) = sqrt(sigma^2 - sigma_mvp^2). Then
 *
 *     q_dr(sigma)  = -1/2 (s - rho/2)^2       + rho^2/8       + q_mvp
 *     q_ef(sigma)  = -1/2 (s - eta^T w_o/2)^2 + (eta^T w_o)^2/8 + q_mvp
 *     q_cml(sigma) = -1/2 sigma^2 + (eta^T w_T / (2 sigma_T)) sigma
 *     q~_dr(sigma) = -1/2 sigma^2 + (sigma/2) sqrt(eta^T V^{-1} eta)
 *
 * and every efficient-DR portfolio is alpha * w_mdrp + (1 - alpha) * w_mvp
 * with alpha = (2/rho) s(sigma).
 */
#pragma once

#include "drfrontier/special_portfolios.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace drfrontier {

enum class EfShape { StronglyConcave, StrictlyDecreasing, Degenerate };

constexpr std::string_view to_string(EfShape s) noexcept {
    switch (s) {
    case EfShape::StronglyConcave: return "StronglyConcave";
    case EfShape::StrictlyDecreasing: return "StrictlyDecreasing";
    case EfShape::Degenerate: return "Degenerate";
    }
    return "Unknown";
}

struct FrontierParams {
    double sigma2_mvp = 0.0;
    double q_mvp = 0.0;
    double rho = 0.0;
    double sigma2_mdrp = 0.0; ///< sigma2_mvp + rho^2/4
    double q_mdrp = 0.0;      ///< q_mvp + rho^2/8
    bool degenerate_rho = false; ///< eta proportional to 1
    std::optional<double> eta_wo;
    std::optional<EtaWoSign> eta_wo_sign;
    /// Inflection point of q_ef when eta^T w_o < 0, using the closed form
    /// sigma_mvp sqrt(1 + |eta^T w_o|^{4/3} / sigma_mvp^{2/3}) as published.
    /// locate_inflection() on a sweep is the authoritative locator.
    std::optional<double> tau_o;
    EfShape ef_shape = EfShape::Degenerate;

    double sigma_mvp() const { return std::sqrt(sigma2_mvp); }
    double sigma_mdrp() const { return std::sqrt(sigma2_mdrp); }
};

inline FrontierParams frontier_params(const AssetUniverse& u) {
    const auto m = detail::eta_moments(u);
    FrontierParams fp;
    fp.sigma2_mvp = m.sigma2_mvp();
    fp.q_mvp = 0.5 * (m.one_eta - 1.0) * fp.sigma2_mvp;
    fp.degenerate_rho = detail::proportional_to_ones(u.variances());
    fp.rho = fp.degenerate_rho ? 0.0 : m.rho();
    fp.sigma2_mdrp = fp.sigma2_mvp + 0.25 * fp.rho * fp.rho;
    fp.q_mdrp = fp.q_mvp + 0.125 * fp.rho * fp.rho;
    if (u.expected_returns() && !detail::proportional_to_ones(*u.expected_returns())) {
        const SelfFinancing sf = self_financing_wo(u);
        const double e = u.variances().dot(sf.w_o);
        fp.eta_wo = e;
        fp.eta_wo_sign = classify_eta_wo(e, fp.rho);
        if (*fp.eta_wo_sign == EtaWoSign::Negative) {
            const double sm = fp.sigma_mvp();
            fp.tau_o = sm * std::sqrt(1.0 + std::pow(std::abs(e), 4.0 / 3.0) / std::cbrt(sm * sm));
            fp.ef_shape = EfShape::StrictlyDecreasing;
        } else {
            fp.ef_shape = EfShape::StronglyConcave;
        }
    }
    return fp;
}

/// sigma^2 - sigma_mvp^2, snapping sigma within 1e-12 below sigma_mvp to zero.
inline double excess_variance(double sigma, double sigma2_mvp) {
    const double sm = std::sqrt(sigma2_mvp);
    if (!(sigma >= sm - 1e-12 * std::max(1.0, sm))) {
        throw Error(ErrorCode::RiskBelowMVP, "sigma = " + std::to_string(sigma) +
                                                 " is below sigma_mvp = " + std::to_string(sm));
    }
    return std::max(sigma * sigma - sigma2_mvp, 0.0);
}

struct KktSolution {
    VectorXd weights;
    bool degenerate = false; ///< c proportional to 1: every feasible point is optimal
    double beta = 0.0;       ///< multiplier of the ellipsoid constraint
    double lambda = 0.0;     ///< multiplier of the budget constraint
};

/**
 * max c^T w  s.t.  1^T w = 1,  w^T V w <= sigma^2.
 *
 * Closed-form boundary solution
 *     beta   = sqrt((c^T V^{-1} c - (1^T V^{-1} c)^2 / a) / (sigma^2 - sigma_mvp^2))
 *     lambda = beta/a - (1^T V^{-1} c)/a
 *     w      = (V^{-1} c + lambda V^{-1} 1) / beta.
 * At sigma = sigma_mvp the feasible set is {w_mvp}. For c proportional to 1
 * the objective is constant; w_mvp is returned with degenerate = true.
 */
inline KktSolution max_linear_over_ellipsoid(const AssetUniverse& u, const VectorXd& c,
                                             double sigma) {
    if (c.size() != u.size()) throw Error(ErrorCode::DimensionMismatch, "objective length");
    const VectorXd inv_ones = u.solve(VectorXd::Ones(u.size()));
    const double a = inv_ones.sum();
    const double excess = excess_variance(sigma, 1.0 / a);
    KktSolution sol;
    const VectorXd w_mvp = inv_ones / a;
    if (detail::proportional_to_ones(c)) {
        sol.weights = w_mvp;
        sol.degenerate = true;
        return sol;
    }
    const VectorXd inv_c = u.solve(c);
    const double one_c = inv_c.sum();
    const double num = c.dot(inv_c) - one_c * one_c / a;
    if (!(num > 0.0)) {
        sol.weights = w_mvp;
        sol.degenerate = true;
        return sol;
    }
    if (excess == 0.0) {
        sol.weights = w_mvp;
        sol.beta = std::numeric_limits<double>::infinity();
        return sol;
    }
    sol.beta = std::sqrt(num / excess);
    sol.lambda = sol.beta / a - one_c / a;
    sol.weights = (inv_c + sol.lambda * inv_ones) / sol.beta;
    return sol;
}

/// Maximum DR at risk sigma. When eta is proportional to 1 every portfolio has
/// the same eta^T w and the curve is reported flat at q_mvp.
inline double q_dr_at(const FrontierParams& fp, double sigma) {
    const double s = std::sqrt(excess_variance(sigma, fp.sigma2_mvp));
    if (fp.degenerate_rho) return fp.q_mvp;
    const double t = s - 0.5 * fp.rho;
    return -0.5 * t * t + 0.125 * fp.rho * fp.rho + fp.q_mvp;
}

struct EfficientDrPoint {
    VectorXd weights;
    double alpha = 0.0;
    bool beyond_mdrp = false; ///< alpha > 1: more risk than the MDRP and less DR
};

/// w(sigma) = alpha w_mdrp + (1 - alpha) w_mvp, alpha = (2/rho) sqrt(sigma^2 - sigma_mvp^2).
inline EfficientDrPoint efficient_dr_portfolio(const AssetUniverse& u, const FrontierParams& fp,
                                               double sigma) {
    const double s = std::sqrt(excess_variance(sigma, fp.sigma2_mvp));
    if (fp.degenerate_rho || !(fp.rho > 0.0)) {
        throw Error(ErrorCode::DegenerateRho,
                    "rho = 0 (eta proportional to 1): the DR frontier is flat and alpha undefined");
    }
    const auto m = detail::eta_moments(u);
    const VectorXd w_mvp = m.inv_ones / m.a;
    const VectorXd d = 0.5 * m.inv_eta - 0.5 * m.one_eta * w_mvp;
    EfficientDrPoint p;
    p.alpha = 2.0 * s / fp.rho;
    p.weights = w_mvp + p.alpha * d;
    p.beyond_mdrp = p.alpha > 1.0 + 1e-12;
    return p;
}

struct MvPoint {
    double q = 0.0;
    VectorXd weights;
};

/// DR of the MV-efficient portfolio w_mvp + s(sigma) w_o.
inline MvPoint q_ef_at(const AssetUniverse& u, const FrontierParams& fp, double sigma) {
    const double s = std::sqrt(excess_variance(sigma, fp.sigma2_mvp));
    const SelfFinancing sf = self_financing_wo(u);
    const double e = fp.eta_wo ? *fp.eta_wo : u.variances().dot(sf.w_o);
    const VectorXd inv_ones = u.solve(VectorXd::Ones(u.size()));
    MvPoint p;
    p.weights = inv_ones / inv_ones.sum() + s * sf.w_o;
    const double t = s - 0.5 * e;
    p.q = -0.5 * t * t + 0.125 * e * e + fp.q_mvp;
    return p;
}

/// q_dr - q_ef = 1/2 (rho - eta^T w_o) sqrt(sigma^2 - sigma_mvp^2) >= 0.
inline double dr_gap_at(const FrontierParams& fp, double sigma) {
    if (!fp.eta_wo) throw Error(ErrorCode::MissingReturns, "eta^T w_o requires expected returns");
    const double s = std::sqrt(excess_variance(sigma, fp.sigma2_mvp));
    return 0.5 * (fp.rho - *fp.eta_wo) * s;
}

/// DR along the capital market line, where sigma = beta * sigma_T.
struct CmlCurve {
    double sigma_T = 0.0;
    double eta_wT = 0.0;
    VectorXd w_T;
    std::optional<double> peak_sigma; ///< eta^T w_T / (2 sigma_T), when eta^T w_T > 0
    std::optional<double> peak_beta;  ///< eta^T w_T / (2 sigma_T^2)

    double slope() const { return eta_wT / (2.0 * sigma_T); }
    double at(double sigma) const { return -0.5 * sigma * sigma + slope() * sigma; }
};

inline CmlCurve cml_curve(const AssetUniverse& u) {
    const Portfolio t = tangent_portfolio(u);
    CmlCurve c;
    c.w_T = t.weights;
    c.sigma_T = std::sqrt(t.variance);
    c.eta_wT = u.variances().dot(t.weights);
    if (c.eta_wT > 0.0) {
        c.peak_sigma = c.eta_wT / (2.0 * c.sigma_T);
        c.peak_beta = c.eta_wT / (2.0 * t.variance);
    }
    return c;
}

inline double q_cml_at(const AssetUniverse& u, double sigma) {
    if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be nonnegative");
    return cml_curve(u).at(sigma);
}

struct RiskFreeDrPoint {
    double q = 0.0;
    VectorXd risky_weights; ///< maximizes q(w) on w^T V w = sigma^2, no budget constraint
    double w0 = 1.0;        ///< weight of the risk-free asset, 1 - 1^T w
    double sigma_eta = 0.0; ///< 1 / sqrt(eta^T V^{-1} eta)
};

/// Efficient DR curve of the (n+1)-asset universe with a risk-free asset.
inline RiskFreeDrPoint q_dr_tilde_at(const AssetUniverse& u, double sigma) {
    if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be nonnegative");
    const VectorXd inv_eta = u.solve(u.variances());
    const double k = std::sqrt(u.variances().dot(inv_eta));
    RiskFreeDrPoint p;
    p.sigma_eta = 1.0 / k;
    p.q = -0.5 * sigma * sigma + 0.5 * sigma * k;
    p.risky_weights = (sigma / k) * inv_eta;
    p.w0 = 1.0 - p.risky_weights.sum();
    return p;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class CurveKind {
    EfficientDR,
    MVEfficientDR,
    CML,
    EfficientDRWithRiskFree,
    MVMeanReturn,
    MDPAtSigma,
};

constexpr std::string_view to_string(CurveKind k) noexcept {
    switch (k) {
    case CurveKind::EfficientDR: return "EfficientDR";
    case CurveKind::MVEfficientDR: return "MVEfficientDR";
    case CurveKind::CML: return "CML";
    case CurveKind::EfficientDRWithRiskFree: return "EfficientDRWithRiskFree";
    case CurveKind::MVMeanReturn: return "MVMeanReturn";
    case CurveKind::MDPAtSigma: return "MDPAtSigma";
    }
    return "Unknown";
}

inline constexpr CurveKind kAllCurveKinds[] = {
    CurveKind::EfficientDR,  CurveKind::MVEfficientDR, CurveKind::CML,
    CurveKind::EfficientDRWithRiskFree, CurveKind::MVMeanReturn, CurveKind::MDPAtSigma,
};

inline std::optional<CurveKind> curve_kind_from_string(std::string_view s) {
    for (CurveKind k : kAllCurveKinds) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

struct CurveRow {
    double sigma = 0.0;
    double q = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> expected_return;
    std::optional<double> centrality;
    std::optional<double> alpha;
    std::optional<VectorXd> weights;
    std::optional<ErrorCode> status; ///< empty when the row evaluated cleanly
    bool beyond_mdrp = false;

    bool ok() const { return !status.has_value(); }
};

struct FrontierCurve {
    CurveKind kind = CurveKind::EfficientDR;
    std::vector<CurveRow> rows;
};

/// n points between sigma_min and sigma_max, linear or geometric.
inline std::vector<double> sigma_grid(double sigma_min, double sigma_max, int points,
                                      bool log_spacing = false) {
    if (points < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points");
    if (!(sigma_max > sigma_min) || !(sigma_min >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "grid requires 0 <= min < max");
    }
    if (log_spacing && !(sigma_min > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "log grid requires min > 0");
    }
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double t = double(i) / double(points - 1);
        g[static_cast<std::size_t>(i)] =
            log_spacing ? sigma_min * std::pow(sigma_max / sigma_min, t)
                        : sigma_min + t * (sigma_max - sigma_min);
    }
    g.back() = sigma_max;
    return g;
}

/// Geometric spacing in sigma^2 - sigma_mvp^2 from 1e-6 sigma_mvp^2 up to
/// sigma^2 = (3 sigma_mdrp)^2, which resolves the pinch near the MVP.
inline std::vector<double> default_sigma_grid(const FrontierParams& fp, int points = 200) {
    if (points < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points");
    const double lo = 1e-6 * fp.sigma2_mvp;
    const double hi = 9.0 * fp.sigma2_mdrp - fp.sigma2_mvp;
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double t = double(i) / double(points - 1);
        g[static_cast<std::size_t>(i)] = std::sqrt(fp.sigma2_mvp + lo * std::pow(hi / lo, t));
    }
    return g;
}

namespace detail {

/// Per-universe quantities reused across every row of a sweep.
struct SweepContext {
    const AssetUniverse& u;
    const EdmEmbedding* emb;
    FrontierParams fp;
    EtaMoments m;
    VectorXd w_mvp;
    VectorXd d;
    std::optional<SelfFinancing> sf;
    std::optional<CmlCurve> cml;
    std::optional<ErrorCode> sf_error;
    std::optional<ErrorCode> cml_error;

    SweepContext(const AssetUniverse& universe, const EdmEmbedding* embedding)
        : u(universe), emb(embedding), fp(frontier_params(universe)), m(eta_moments(universe)) {
        w_mvp = m.inv_ones / m.a;
        d = 0.5 * m.inv_eta - 0.5 * m.one_eta * w_mvp;
        try {
            sf = self_financing_wo(u);
        } catch (const Error& e) {
            sf_error = e.code();
        }
        try {
            cml = cml_curve(u);
        } catch (const Error& e) {
            cml_error = e.code();
        }
    }

    void fill_budget_stats(CurveRow& row, const VectorXd& w) const {
        if (u.expected_returns()) row.expected_return = u.expected_returns()->dot(w);
        if (emb) row.centrality = std::sqrt(std::max(centrality_sq(*emb, w), 0.0));
        row.weights = w;
    }

    CurveRow evaluate(CurveKind kind, double sigma) const {
        CurveRow row;
        row.sigma = sigma;
        switch (kind) {
        case CurveKind::EfficientDR: {
            row.q = q_dr_at(fp, sigma);
            if (fp.degenerate_rho || !(fp.rho > 0.0)) {
                fill_budget_stats(row, w_mvp);
                break;
            }
            const double s = std::sqrt(excess_variance(sigma, fp.sigma2_mvp));
            row.alpha = 2.0 * s / fp.rho;
            row.beyond_mdrp = *row.alpha > 1.0 + 1e-12;
            fill_budget_stats(row, w_mvp + *row.alpha * d);
            break;
        }
        case CurveKind::MVEfficientDR:
        case CurveKind::MVMeanReturn: {
            if (!sf) throw Error(*sf_error, "MV frontier unavailable");
            const double s = std::sqrt(excess_variance(sigma, fp.sigma2_mvp));
            const double e = u.variances().dot(sf->w_o);
            const double t = s - 0.5 * e;
            row.q = -0.5 * t * t + 0.125 * e * e + fp.q_mvp;
            const VectorXd w = w_mvp + s * sf->w_o;
            fill_budget_stats(row, w);
            if (kind == CurveKind::MVMeanReturn) {
                row.expected_return = sf->b / sf->a + s * sf->kappa;
            }
            break;
        }
        case CurveKind::CML: {
            if (!cml) throw Error(*cml_error, "tangent portfolio unavailable");
            if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative sigma");
            row.q = cml->at(sigma);
            const double beta = sigma / cml->sigma_T;
            row.alpha = beta;
            row.weights = beta * cml->w_T;
            const double r0 = *u.risk_free_rate();
            row.expected_return = r0 + beta * (u.expected_returns()->dot(cml->w_T) - r0);
            break;
        }
        case CurveKind::EfficientDRWithRiskFree: {
            const RiskFreeDrPoint p = q_dr_tilde_at(u, sigma);
            row.q = p.q;
            row.weights = p.risky_weights;
            if (u.expected_returns()) {
                row.expected_return = u.expected_returns()->dot(p.risky_weights) +
                                      p.w0 * u.risk_free_rate().value_or(0.0);
            }
            break;
        }
        case CurveKind::MDPAtSigma: {
            const VectorXd root_eta = u.variances().cwiseSqrt();
            const KktSolution k = max_linear_over_ellipsoid(u, root_eta, sigma);
            row.q = 0.5 * (u.variances().dot(k.weights) - k.weights.dot(u.covariance() * k.weights));
            fill_budget_stats(row, k.weights);
            break;
        }
        }
        return row;
    }
};

}  // namespace detail

/**
 * Evaluates one curve over an ascending sigma grid. Failures at a single point
 * become row status flags; the sweep itself only throws on a malformed grid.
 */
inline FrontierCurve sweep(const AssetUniverse& u, CurveKind kind, std::span<const double> grid,
                           const EdmEmbedding* emb = nullptr) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw Error(ErrorCode::InvalidArgument, "sigma grid must be strictly increasing");
        }
    }
    if (emb && emb->universe_hash != u.fingerprint()) {
        throw Error(ErrorCode::EmbeddingMismatch, "embedding was built from a different universe");
    }
    const detail::SweepContext ctx(u, emb);
    FrontierCurve curve;
    curve.kind = kind;
    curve.rows.reserve(grid.size());
    for (double sigma : grid) {
        try {
            curve.rows.push_back(ctx.evaluate(kind, sigma));
        } catch (const Error& e) {
            CurveRow row;
            row.sigma = sigma;
            row.status = e.code();
            curve.rows.push_back(std::move(row));
        }
    }
    return curve;
}

/// Second derivative estimates on a nonuniform grid, one per interior row.
/// Entries are NaN wherever a neighbour failed.
inline std::vector<double> second_differences(const FrontierCurve& c) {
    std::vector<double> out;
    const auto& r = c.rows;
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
        if (!r[i - 1].ok() || !r[i].ok() || !r[i + 1].ok()) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double h0 = r[i].sigma - r[i - 1].sigma;
        const double h1 = r[i + 1].sigma - r[i].sigma;
        const double s0 = (r[i].q - r[i - 1].q) / h0;
        const double s1 = (r[i + 1].q - r[i].q) / h1;
        out.push_back(2.0 * (s1 - s0) / (h0 + h1));
    }
    return out;
}

/// Sigma where the sweep's curvature first turns from convex to concave,
/// interpolated between the bracketing interior rows.
inline std::optional<double> locate_inflection(const FrontierCurve& c) {
    const auto dd = second_differences(c);
    for (std::size_t i = 1; i < dd.size(); ++i) {
        if (dd[i - 1] > 0.0 && dd[i] <= 0.0) {
            const double x0 = c.rows[i].sigma;
            const double x1 = c.rows[i + 1].sigma;
            const double t = dd[i - 1] / (dd[i - 1] - dd[i]);
            return x0 + t * (x1 - x0);
        }
    }
    return std::nullopt;
}

/// Row index of the largest q among successfully evaluated rows.
inline std::optional<std::size_t> locate_peak(const FrontierCurve& c) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
        if (c.rows[i].ok() && (!best || c.rows[i].q > c.rows[*best].q)) best = i;
    }
    return best;
}

}  // namespace drfrontier
