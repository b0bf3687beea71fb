#include "drfrontier/frontiers.hpp"

#include "fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace drfrontier;

namespace {

std::vector<double> linear_sigmas(const FrontierParams& fp, double top_factor, int count) {
    std::vector<double> g;
    const double lo = fp.sigma_mvp();
    const double hi = top_factor * fp.sigma_mdrp();
    for (int i = 0; i < count; ++i) g.push_back(lo + (hi - lo) * (i + 1) / count);
    return g;
}

}  // namespace

TEST(FrontierParams, ThreeAssetExample) {
    const auto fp = frontier_params(testsupport::three_asset());
    EXPECT_NEAR(fp.sigma2_mvp, 1.0, 1e-14);
    EXPECT_NEAR(fp.q_mvp, 5.0 / 9.0, 1e-14);
    EXPECT_NEAR(fp.rho * fp.rho, 32.0 / 9.0, 1e-13);
    EXPECT_NEAR(fp.sigma2_mdrp, 17.0 / 9.0, 1e-13);
    EXPECT_NEAR(fp.q_mdrp, 1.0, 1e-13);
    EXPECT_FALSE(fp.eta_wo);
}

TEST(FrontierParams, IdentityIsDegenerate) {
    const auto fp = frontier_params(validate_universe(MatrixXd::Identity(4, 4)));
    EXPECT_TRUE(fp.degenerate_rho);
    EXPECT_EQ(fp.rho, 0.0);
    EXPECT_EQ(fp.ef_shape, EfShape::Degenerate);
    EXPECT_NEAR(q_dr_at(fp, 0.9), fp.q_mvp, 1e-15);
}

TEST(Kkt, RecoversMdrpAndMvp) {
    const auto u = testsupport::three_asset();
    const auto k = max_linear_over_ellipsoid(u, 2.0 * u.variances(), std::sqrt(17.0 / 9.0));
    VectorXd w(3);
    w << -1, 1, 1;
    EXPECT_LT((k.weights - w).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GT(k.beta, 0.0);

    testsupport::Gen gen(41);
    const auto r = gen.universe(6);
    const auto fp = frontier_params(r);
    const auto at_mvp = max_linear_over_ellipsoid(r, gen.normal_vector(6), fp.sigma_mvp());
    EXPECT_LT((at_mvp.weights - min_variance_portfolio(r).weights).cwiseAbs().maxCoeff(), 1e-14);

    const auto flat = max_linear_over_ellipsoid(r, VectorXd::Constant(6, 3.0), 2.0 * fp.sigma_mvp());
    EXPECT_TRUE(flat.degenerate);
}

TEST(Kkt, BelowMvpRiskIsRejectedAndBoundarySnaps) {
    const auto u = testsupport::three_asset();
    EXPECT_THROW(max_linear_over_ellipsoid(u, u.variances(), 0.99), Error);
    EXPECT_NO_THROW(max_linear_over_ellipsoid(u, u.variances(), 1.0 - 1e-13));
}

TEST(Kkt, LinearObjectiveMatchesDenseEllipseSearch) {
    testsupport::Gen gen(42);
    for (int k = 0; k < 10; ++k) {
        const auto u = gen.universe(3);
        const auto fp = frontier_params(u);
        const double sigma = std::sqrt(2.0) * fp.sigma_mvp();
        const VectorXd c = gen.normal_vector(3);
        const auto sol = max_linear_over_ellipsoid(u, c, sigma);
        const testsupport::FeasibleCircle circle(u.covariance(), sigma);
        const VectorXd best = circle.argmax([&](const VectorXd& w) { return c.dot(w); });
        EXPECT_NEAR(c.dot(sol.weights), c.dot(best), 1e-8);
        EXPECT_NEAR(sol.weights.dot(u.covariance() * sol.weights), sigma * sigma, 1e-12);
    }
}

TEST(QDr, EndpointsOnThreeAssetExample) {
    const auto u = testsupport::three_asset();
    const auto fp = frontier_params(u);
    EXPECT_NEAR(q_dr_at(fp, 1.0), 5.0 / 9.0, 1e-14);
    EXPECT_NEAR(q_dr_at(fp, std::sqrt(17.0) / 3.0), 1.0, 1e-13);
    const auto k = max_linear_over_ellipsoid(u, 2.0 * u.variances(), std::sqrt(3.0));
    EXPECT_NEAR(q_dr_at(fp, std::sqrt(3.0)), diversification_return(u, k.weights), 1e-8);
}

TEST(EfficientDr, AlphaEndpointsAndSeparation) {
    const auto u = testsupport::three_asset();
    const auto fp = frontier_params(u);
    const auto start = efficient_dr_portfolio(u, fp, 1.0);
    EXPECT_EQ(start.alpha, 0.0);
    EXPECT_LT((start.weights - VectorXd::Constant(3, 1.0 / 3.0)).cwiseAbs().maxCoeff(), 1e-14);
    const auto top = efficient_dr_portfolio(u, fp, fp.sigma_mdrp());
    EXPECT_NEAR(top.alpha, 1.0, 1e-12);
    EXPECT_FALSE(top.beyond_mdrp);
    const double sigma = std::sqrt(13.0 / 9.0);
    const auto mid = efficient_dr_portfolio(u, fp, sigma);
    EXPECT_NEAR(mid.alpha, 2.0 / fp.rho * (2.0 / 3.0), 1e-12);
    const auto k = max_linear_over_ellipsoid(u, 2.0 * u.variances(), sigma);
    EXPECT_LT((mid.weights - k.weights).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_TRUE(efficient_dr_portfolio(u, fp, 2.0).beyond_mdrp);
}

TEST(EfficientDr, DegenerateUniverseHasNoAlpha) {
    const auto u = validate_universe(MatrixXd::Identity(3, 3));
    try {
        efficient_dr_portfolio(u, frontier_params(u), 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateRho);
    }
}

TEST(MvFrontier, StartsAtMvpAndBeatsSampledPortfoliosOnReturn) {
    testsupport::Gen gen(43);
    const auto u = gen.universe(5);
    const auto fp = frontier_params(u);
    EXPECT_NEAR(q_ef_at(u, fp, fp.sigma_mvp()).q, fp.q_mvp, 1e-15);

    const double sigma = std::sqrt(2.0) * fp.sigma_mvp();
    const VectorXd w_mv = q_ef_at(u, fp, sigma).weights;
    const double best = u.expected_returns()->dot(w_mv);
    // sample the feasible set: w_mvp + t N z with w^T V w <= sigma^2
    const VectorXd w_mvp = min_variance_portfolio(u).weights;
    int accepted = 0;
    while (accepted < 10000) {
        VectorXd z = gen.normal_vector(5);
        z.array() -= z.mean();
        const double excess = z.dot(u.covariance() * z);
        const double room = sigma * sigma - fp.sigma2_mvp;
        const VectorXd w = w_mvp + std::sqrt(room / excess) * gen.uniform(0.0, 1.0) * z;
        if (w.dot(u.covariance() * w) > sigma * sigma * (1.0 + 1e-12)) continue;
        ++accepted;
        EXPECT_LE(u.expected_returns()->dot(w), best + 1e-12);
    }
}

TEST(FrontierIdentities, RandomUniverses) {
    testsupport::Gen gen(44);
    for (int k = 0; k < 30; ++k) {
        const auto u = gen.universe(gen.integer(2, 25));
        const auto fp = frontier_params(u);
        const auto grid = linear_sigmas(fp, 3.0, 50);
        const double gap0 = dr_gap_at(fp, grid.front()) /
                            std::sqrt(grid.front() * grid.front() - fp.sigma2_mvp);
        for (double sigma : grid) {
            const double qdr = q_dr_at(fp, sigma);
            const double qef = q_ef_at(u, fp, sigma).q;
            EXPECT_GE(qdr, qef - 1e-12);
            EXPECT_NEAR(qdr - qef, dr_gap_at(fp, sigma), 1e-10);
            const double s = std::sqrt(sigma * sigma - fp.sigma2_mvp);
            EXPECT_NEAR(dr_gap_at(fp, sigma) / s, gap0, 1e-10);
            // the closed form for q_dr must agree with q evaluated at its portfolio
            const auto p = efficient_dr_portfolio(u, fp, sigma);
            EXPECT_NEAR(testsupport::q_direct(u.covariance(), p.weights), qdr, 1e-10);
            EXPECT_NEAR(p.weights.dot(u.covariance() * p.weights), sigma * sigma,
                        1e-10 * sigma * sigma);
        }
    }
}

TEST(FrontierIdentities, ProportionalReturnsCollapseCurves) {
    testsupport::Gen gen(45);
    for (int k = 0; k < 10; ++k) {
        const MatrixXd V = gen.covariance(gen.integer(3, 15));
        const auto u = validate_universe(V, VectorXd(V.diagonal() * gen.uniform(0.3, 3.0)));
        const auto fp = frontier_params(u);
        EXPECT_NEAR(*fp.eta_wo, fp.rho, 1e-10);
        for (double sigma : linear_sigmas(fp, 2.0, 50)) {
            EXPECT_NEAR(q_dr_at(fp, sigma), q_ef_at(u, fp, sigma).q, 1e-10);
            EXPECT_NEAR(dr_gap_at(fp, sigma), 0.0, 1e-10);
        }
    }
}

TEST(Cml, RootsAndPeak) {
    testsupport::Gen gen(46);
    const auto u = gen.universe(5, true, -0.5);
    const auto c = cml_curve(u);
    EXPECT_EQ(q_cml_at(u, 0.0), 0.0);
    ASSERT_GT(c.eta_wT, 0.0);
    EXPECT_NEAR(q_cml_at(u, c.eta_wT / c.sigma_T), 0.0, 1e-14);
    ASSERT_TRUE(c.peak_sigma);
    EXPECT_GT(c.at(*c.peak_sigma), c.at(*c.peak_sigma * 1.01));
    EXPECT_GT(c.at(*c.peak_sigma), c.at(*c.peak_sigma * 0.99));
    EXPECT_NEAR(*c.peak_beta * c.sigma_T, *c.peak_sigma, 1e-14);
}

TEST(Cml, MatchesBlockQuadraticForm) {
    testsupport::Gen gen(47);
    VectorXd rbar(3);
    rbar << 0.05, 0.09, 0.12;
    const auto u = validate_universe(gen.covariance(3), rbar, 0.02);
    const auto c = cml_curve(u);
    for (int i = 0; i < 20; ++i) {
        const double sigma = 0.05 * (i + 1);
        const double beta = sigma / c.sigma_T;
        EXPECT_NEAR(q_cml_at(u, sigma),
                    testsupport::q_block(u.covariance(), beta * c.w_T, 1.0 - beta), 1e-12);
    }
}

TEST(RiskFreeDr, ZeroRiskAndBlockForm) {
    testsupport::Gen gen(48);
    const auto u = gen.universe(4, true, 0.01);
    const auto zero = q_dr_tilde_at(u, 0.0);
    EXPECT_EQ(zero.q, 0.0);
    EXPECT_EQ(zero.w0, 1.0);
    EXPECT_EQ(zero.risky_weights.norm(), 0.0);
    for (int i = 1; i <= 20; ++i) {
        const double sigma = 0.03 * i;
        const auto p = q_dr_tilde_at(u, sigma);
        EXPECT_NEAR(p.q, testsupport::q_block(u.covariance(), p.risky_weights, p.w0), 1e-12);
        EXPECT_NEAR(p.risky_weights.dot(u.covariance() * p.risky_weights), sigma * sigma, 1e-12);
        EXPECT_GE(p.q, q_cml_at(u, sigma) - 1e-12);
    }
}

TEST(RiskFreeDr, TangentInequalityAndCollapse) {
    testsupport::Gen gen(49);
    int checked = 0;
    while (checked < 100) {
        const auto u = gen.universe(gen.integer(2, 20), true, gen.uniform(-0.05, 0.0));
        CmlCurve c;
        try {
            c = cml_curve(u);
        } catch (const Error&) {
            continue;
        }
        ++checked;
        const double k = 1.0 / q_dr_tilde_at(u, 1.0).sigma_eta;
        EXPECT_GE(k * c.sigma_T - c.eta_wT, -1e-12);
    }

    const MatrixXd V = gen.covariance(6);
    const double r0 = 0.03;
    const double gamma = 1.7;
    const auto u = validate_universe(V, VectorXd(V.diagonal().array() / gamma + r0), r0);
    for (int i = 1; i <= 50; ++i) {
        const double sigma = 0.02 * i;
        EXPECT_NEAR(q_dr_tilde_at(u, sigma).q, q_cml_at(u, sigma), 1e-10);
    }
}

TEST(Sweep, ThreeAssetPeakAndShape) {
    const auto u = testsupport::three_asset();
    const auto grid = sigma_grid(1.0, 2.0, 401);
    const auto curve = sweep(u, CurveKind::EfficientDR, grid);
    const auto peak = locate_peak(curve);
    ASSERT_TRUE(peak);
    EXPECT_NEAR(curve.rows[*peak].sigma, std::sqrt(17.0) / 3.0, 0.5 * (grid[1] - grid[0]) + 1e-12);
    for (std::size_t i = 1; i <= *peak; ++i) EXPECT_GT(curve.rows[i].q, curve.rows[i - 1].q);
    for (std::size_t i = *peak + 1; i < grid.size(); ++i) EXPECT_LT(curve.rows[i].q, curve.rows[i - 1].q);
    for (double dd : second_differences(curve)) EXPECT_LT(dd, 0.0);
}

TEST(Sweep, DegenerateUniverseIsFlat) {
    const auto u = validate_universe(MatrixXd::Identity(3, 3));
    const auto fp = frontier_params(u);
    const auto curve = sweep(u, CurveKind::EfficientDR, default_sigma_grid(fp, 20));
    for (const auto& r : curve.rows) {
        ASSERT_TRUE(r.ok());
        EXPECT_EQ(r.q, fp.q_mvp);
        EXPECT_FALSE(r.alpha);
    }
}

TEST(Sweep, RowFailuresAreFlaggedNotThrown) {
    const auto u = testsupport::three_asset();
    const std::vector<double> grid{0.5, 1.0, 1.5};
    const auto curve = sweep(u, CurveKind::EfficientDR, grid);
    ASSERT_EQ(curve.rows.size(), 3u);
    EXPECT_EQ(curve.rows[0].status, ErrorCode::RiskBelowMVP);
    EXPECT_TRUE(curve.rows[1].ok());
    const auto mv = sweep(u, CurveKind::MVEfficientDR, grid);
    for (const auto& r : mv.rows) EXPECT_FALSE(r.ok());
    EXPECT_THROW(sweep(u, CurveKind::EfficientDR, std::vector<double>{1.2, 1.1}), Error);
}

TEST(Sweep, DecreasingMvCurveChangesCurvatureOnce) {
    testsupport::Gen gen(50);
    int tested = 0;
    while (tested < 10) {
        const auto u = gen.universe(gen.integer(3, 10));
        const auto fp = frontier_params(u);
        if (fp.ef_shape != EfShape::StrictlyDecreasing) continue;
        ++tested;
        const auto curve = sweep(u, CurveKind::MVEfficientDR, default_sigma_grid(fp, 400));
        for (std::size_t i = 1; i < curve.rows.size(); ++i) {
            EXPECT_LT(curve.rows[i].q, curve.rows[i - 1].q);
        }
        const auto dd = second_differences(curve);
        std::size_t flips = 0;
        for (std::size_t i = 1; i < dd.size(); ++i) flips += (dd[i] > 0.0) != (dd[i - 1] > 0.0);
        EXPECT_EQ(flips, 1u);
        EXPECT_GT(dd.front(), 0.0);
        EXPECT_LT(dd.back(), 0.0);
        ASSERT_TRUE(locate_inflection(curve));
        ASSERT_TRUE(fp.tau_o);
    }
}

TEST(Sweep, StronglyConcaveDrCurveAndDominance) {
    testsupport::Gen gen(51);
    for (int k = 0; k < 10; ++k) {
        const auto u = gen.universe(gen.integer(2, 15));
        const auto fp = frontier_params(u);
        const auto grid = linear_sigmas(fp, 3.0, 100);
        const auto dr = sweep(u, CurveKind::EfficientDR, grid);
        const auto ef = sweep(u, CurveKind::MVEfficientDR, grid);
        for (double dd : second_differences(dr)) EXPECT_LT(dd, -1e-6);
        for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_GE(dr.rows[i].q, ef.rows[i].q - 1e-12);
        const auto peak = locate_peak(dr);
        ASSERT_TRUE(peak);
        const double h = grid[1] - grid[0];
        EXPECT_NEAR(dr.rows[*peak].sigma, fp.sigma_mdrp(), h);
    }
}

TEST(Sweep, MeanReturnCurveMatchesPortfolioReturn) {
    testsupport::Gen gen(52);
    const auto u = gen.universe(8);
    const auto fp = frontier_params(u);
    const auto c = sweep(u, CurveKind::MVMeanReturn, default_sigma_grid(fp, 50));
    for (const auto& r : c.rows) {
        ASSERT_TRUE(r.ok());
        EXPECT_NEAR(*r.expected_return, u.expected_returns()->dot(*r.weights), 1e-12);
    }
}

TEST(Sweep, CurveKindNamesRoundTrip) {
    for (CurveKind k : kAllCurveKinds) EXPECT_EQ(curve_kind_from_string(to_string(k)), k);
    EXPECT_FALSE(curve_kind_from_string("nope"));
}

TEST(Grid, DefaultSpacingAndValidation) {
    const auto fp = frontier_params(testsupport::three_asset());
    const auto g = default_sigma_grid(fp);
    ASSERT_EQ(g.size(), 200u);
    EXPECT_NEAR(g.front() * g.front() - fp.sigma2_mvp, 1e-6 * fp.sigma2_mvp, 1e-15);
    EXPECT_NEAR(g.back(), 3.0 * fp.sigma_mdrp(), 1e-12);
    const double r0 = (g[1] * g[1] - fp.sigma2_mvp) / (g[0] * g[0] - fp.sigma2_mvp);
    const double r1 = (g[101] * g[101] - fp.sigma2_mvp) / (g[100] * g[100] - fp.sigma2_mvp);
    EXPECT_NEAR(r0, r1, 1e-6);
    EXPECT_THROW(sigma_grid(1.0, 2.0, 1), Error);
    EXPECT_THROW(sigma_grid(2.0, 1.0, 5), Error);
    EXPECT_THROW(sigma_grid(0.0, 1.0, 5, true), Error);
}
