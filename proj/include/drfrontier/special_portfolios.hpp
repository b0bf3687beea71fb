/**
 * @file special_portfolios.hpp
 * @brief Closed-form special portfolios: MVP, MDRP, w_o, Q-portfolio, tangent.
 *
 * Every V^{-1} application goes through the universe's cached Cholesky factor.
 */
#pragma once

#include "drfrontier/edm.hpp"
#include "drfrontier/portfolio.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace drfrontier {

namespace detail {

/// Scalars built from V^{-1}, 1 and eta that most closed forms share.
struct EtaMoments {
    VectorXd inv_ones; ///< V^{-1} 1
    VectorXd inv_eta;  ///< V^{-1} eta
    double a = 0.0;    ///< 1^T V^{-1} 1
    double one_eta = 0.0;
    double eta_eta = 0.0;

    double sigma2_mvp() const { return 1.0 / a; }
    double rho() const { return std::sqrt(std::max(eta_eta - one_eta * one_eta / a, 0.0)); }
};

inline EtaMoments eta_moments(const AssetUniverse& u) {
    EtaMoments m;
    const VectorXd ones = VectorXd::Ones(u.size());
    m.inv_ones = u.solve(ones);
    m.inv_eta = u.solve(u.variances());
    m.a = m.inv_ones.sum();
    m.one_eta = m.inv_eta.sum();
    m.eta_eta = u.variances().dot(m.inv_eta);
    return m;
}

}  // namespace detail

/// w = V^{-1} 1 / (1^T V^{-1} 1), variance 1/(1^T V^{-1} 1).
inline Portfolio min_variance_portfolio(const AssetUniverse& u) {
    const VectorXd x = u.solve(VectorXd::Ones(u.size()));
    const double a = x.sum();
    Portfolio p = portfolio_stats(u, x / a);
    p.variance = 1.0 / a;
    return p;
}

/// Both closed forms of the maximum-DR portfolio.
struct MdrpForms {
    VectorXd via_distance;   ///< D^{-1} 1 / (1^T D^{-1} 1)
    VectorXd via_covariance; ///< (1 - 1^T V^{-1} eta / 2) w_mvp + V^{-1} eta / 2
    double max_abs_diff = 0.0;
};

inline MdrpForms max_dr_forms(const AssetUniverse& u) {
    const auto m = detail::eta_moments(u);
    MdrpForms f;
    f.via_covariance = (1.0 - 0.5 * m.one_eta) * (m.inv_ones / m.a) + 0.5 * m.inv_eta;
    const MatrixXd D = build_distance_matrix(u);
    const VectorXd y = detail::generalized_inverse_times_ones(D).first;
    f.via_distance = y / y.sum();
    f.max_abs_diff = (f.via_distance - f.via_covariance).cwiseAbs().maxCoeff();
    return f;
}

/// Maximum-DR portfolio via the V-form; its DR is q_max.
inline Portfolio max_dr_portfolio(const AssetUniverse& u) {
    const auto m = detail::eta_moments(u);
    const VectorXd w = (1.0 - 0.5 * m.one_eta) * (m.inv_ones / m.a) + 0.5 * m.inv_eta;
    return portfolio_stats(u, w);
}

struct SelfFinancing {
    VectorXd w_o; ///< 1^T w_o = 0, w_o^T V w_o = 1
    double a = 0.0;
    double b = 0.0;
    double kappa = 0.0; ///< sqrt((rbar - b/a 1)^T V^{-1} (rbar - b/a 1)), slope of the MV frontier
};

inline SelfFinancing self_financing_wo(const AssetUniverse& u) {
    const VectorXd& rbar = u.returns_or_throw();
    if (detail::proportional_to_ones(rbar)) {
        throw Error(ErrorCode::DegenerateReturns,
                    "expected returns are proportional to 1: all portfolios have the same return");
    }
    SelfFinancing sf;
    const VectorXd inv_ones = u.solve(VectorXd::Ones(u.size()));
    const VectorXd inv_r = u.solve(rbar);
    sf.a = inv_ones.sum();
    sf.b = inv_r.sum();
    const VectorXd x = inv_r - (sf.b / sf.a) * inv_ones; // V^{-1}(rbar - b/a 1)
    const VectorXd excess = rbar.array() - sf.b / sf.a;
    const double norm2 = excess.dot(x);
    if (!(norm2 > 0.0)) {
        throw Error(ErrorCode::DegenerateReturns, "excess returns have zero V^{-1} norm");
    }
    sf.kappa = std::sqrt(norm2);
    sf.w_o = x / sf.kappa;
    return sf;
}

enum class EtaWoSign { Positive, Zero, Negative };

constexpr std::string_view to_string(EtaWoSign s) noexcept {
    switch (s) {
    case EtaWoSign::Positive: return "positive";
    case EtaWoSign::Zero: return "zero";
    case EtaWoSign::Negative: return "negative";
    }
    return "unknown";
}

inline EtaWoSign classify_eta_wo(double eta_wo, double rho) {
    if (std::abs(eta_wo) <= kProportionalTol * rho) return EtaWoSign::Zero;
    return eta_wo > 0.0 ? EtaWoSign::Positive : EtaWoSign::Negative;
}

struct QPortfolio {
    Portfolio portfolio;
    double eta_wo = 0.0;
    EtaWoSign sign = EtaWoSign::Zero;
};

/// w_Q = w_mvp + (eta^T w_o / 2) w_o: the MV-efficient portfolio of highest DR
/// when eta^T w_o >= 0. For eta^T w_o exactly zero this is w_mvp.
inline QPortfolio q_portfolio(const AssetUniverse& u) {
    const SelfFinancing sf = self_financing_wo(u);
    const auto m = detail::eta_moments(u);
    QPortfolio q;
    q.eta_wo = u.variances().dot(sf.w_o);
    q.sign = classify_eta_wo(q.eta_wo, m.rho());
    const double coef = q.sign == EtaWoSign::Zero ? 0.0 : 0.5 * q.eta_wo;
    const VectorXd w = m.inv_ones / m.a + coef * sf.w_o;
    q.portfolio = portfolio_stats(u, w);
    return q;
}

/// w_T = V^{-1}(rbar - r0 1) / (b - r0 a). Exists only when the MVP return exceeds r0.
inline Portfolio tangent_portfolio(const AssetUniverse& u) {
    const VectorXd& rbar = u.returns_or_throw();
    if (!u.risk_free_rate()) throw Error(ErrorCode::MissingReturns, "risk-free rate is required");
    const double r0 = *u.risk_free_rate();
    const VectorXd inv_ones = u.solve(VectorXd::Ones(u.size()));
    const VectorXd inv_r = u.solve(rbar);
    const double a = inv_ones.sum();
    const double b = inv_r.sum();
    const double denom = b - r0 * a;
    if (!(denom > 1e-12 * std::max(std::abs(b), std::abs(r0 * a)))) {
        throw Error(ErrorCode::TangencyInfeasible,
                    "b - r0 a = " + std::to_string(denom) +
                        " <= 0: the minimum-variance portfolio return must exceed r0");
    }
    return portfolio_stats(u, (inv_r - r0 * inv_ones) / denom);
}

/// Everything the closed forms give for one universe.
struct SpecialPortfolios {
    Portfolio mvp;
    Portfolio mdrp;
    VectorXd d; ///< w_mdrp - w_mvp
    double a = 0.0;
    double rho = 0.0;
    std::optional<VectorXd> w_o;
    std::optional<double> b;
    std::optional<QPortfolio> q;
    std::optional<Portfolio> tangent;
    /// Why an optional member is absent, e.g. "DegenerateReturns: ...".
    std::vector<std::string> notes;
};

inline SpecialPortfolios special_portfolios(const AssetUniverse& u,
                                            const EdmEmbedding* emb = nullptr) {
    SpecialPortfolios sp;
    const auto m = detail::eta_moments(u);
    sp.a = m.a;
    sp.rho = m.rho();
    sp.mvp = portfolio_stats(u, min_variance_portfolio(u).weights, emb);
    sp.mdrp = portfolio_stats(u, max_dr_portfolio(u).weights, emb);
    sp.d = sp.mdrp.weights - sp.mvp.weights;
    if (u.expected_returns()) {
        try {
            const SelfFinancing sf = self_financing_wo(u);
            sp.w_o = sf.w_o;
            sp.b = sf.b;
            QPortfolio q = q_portfolio(u);
            q.portfolio = portfolio_stats(u, q.portfolio.weights, emb);
            sp.q = std::move(q);
        } catch (const Error& e) {
            sp.notes.emplace_back(e.what());
        }
        if (u.risk_free_rate()) {
            try {
                sp.tangent = portfolio_stats(u, tangent_portfolio(u).weights, emb);
            } catch (const Error& e) {
                sp.notes.emplace_back(e.what());
            }
        }
    }
    return sp;
}

}  // namespace drfrontier
