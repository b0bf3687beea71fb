#include "drfrontier/edm.hpp"
#include "drfrontier/portfolio.hpp"

#include "fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace drfrontier;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected drfrontier::Error";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ValidateUniverse, AcceptsSingularPsdMatrix) {
    const auto u = validate_universe(testsupport::cash_plus_two_v());
    EXPECT_FALSE(u.nonsingular());
    EXPECT_EQ(u.size(), 3);
    EXPECT_EQ(u.names()[0], "A1");
}

TEST(ValidateUniverse, IdentityIsNonsingular) {
    const auto u = validate_universe(MatrixXd::Identity(2, 2));
    EXPECT_TRUE(u.nonsingular());
    EXPECT_DOUBLE_EQ(u.min_eigenvalue(), 1.0);
}

TEST(ValidateUniverse, Rejections) {
    MatrixXd indefinite(2, 2);
    indefinite << 1, 2, 2, 1;
    EXPECT_EQ(code_of([&] { validate_universe(indefinite); }), ErrorCode::NotPSD);
    EXPECT_EQ(code_of([] { validate_universe(MatrixXd::Identity(2, 3)); }), ErrorCode::NonSquare);
    EXPECT_EQ(code_of([] { validate_universe(MatrixXd::Identity(1, 1)); }),
              ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([] { validate_universe(MatrixXd::Identity(3, 3), VectorXd::Ones(2)); }),
              ErrorCode::DimensionMismatch);
    MatrixXd skew = MatrixXd::Identity(2, 2);
    skew(0, 1) = 1e-6;
    EXPECT_EQ(code_of([&] { validate_universe(skew); }), ErrorCode::Asymmetric);
}

TEST(ValidateUniverse, RepairsTinyAsymmetryAndNoise) {
    MatrixXd V = testsupport::three_asset_v();
    V(0, 1) += 1e-14;
    const auto u = validate_universe(V);
    EXPECT_EQ(u.covariance(), u.covariance().transpose());
    for (Index i = 0; i < 3; ++i) EXPECT_EQ(u.variances()(i), u.covariance()(i, i));

    // rank-one matrix with a -1e-13 eigenvalue nudge is accepted and clamped
    VectorXd v(3);
    v << 1, 2, 3;
    MatrixXd R = v * v.transpose() - 1e-13 * MatrixXd::Identity(3, 3);
    const auto r = validate_universe(R);
    EXPECT_FALSE(r.nonsingular());
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<MatrixXd>(r.covariance()).eigenvalues().minCoeff(),
              -1e-14);
}

TEST(DiversificationReturn, SizeOfTheUniverseMatters) {
    const auto full = validate_universe(testsupport::cash_plus_two_v());
    VectorXd w(3);
    w << 0.5, 0.25, 0.25;
    EXPECT_NEAR(diversification_return(full, w), 3.0 / 16.0, 1e-15);

    // the two risky assets merged into one composite with variance 1/2
    MatrixXd merged = MatrixXd::Zero(2, 2);
    merged(1, 1) = 0.5;
    const auto small = validate_universe(merged);
    EXPECT_NEAR(diversification_return(small, VectorXd::Constant(2, 0.5)), 1.0 / 16.0, 1e-15);
}

TEST(DiversificationReturn, ConcentratedPortfoliosHaveNone) {
    testsupport::Gen gen(11);
    const auto u = gen.universe(6);
    for (Index i = 0; i < 6; ++i) {
        EXPECT_NEAR(diversification_return(u, VectorXd::Unit(6, i)), 0.0, 1e-16);
    }
}

TEST(DiversificationReturn, BudgetIsEnforced) {
    const auto u = testsupport::three_asset();
    EXPECT_EQ(code_of([&] { diversification_return(u, VectorXd::Constant(3, 0.3)); }),
              ErrorCode::BudgetViolation);
    EXPECT_EQ(code_of([&] { diversification_return(u, VectorXd::Constant(2, 0.5)); }),
              ErrorCode::DimensionMismatch);
    VectorXd w = VectorXd::Constant(3, 1.0 / 3.0);
    w(0) += 5e-11;
    EXPECT_NO_THROW(diversification_return(u, w));
}

TEST(DiversificationReturn, EqualsHalfDistanceQuadraticForm) {
    testsupport::Gen gen(12);
    for (int k = 0; k < 5; ++k) {
        const auto u = gen.universe(gen.integer(2, 12));
        const MatrixXd D = build_distance_matrix(u);
        for (int t = 0; t < 1000; ++t) {
            const VectorXd w = gen.budget_portfolio(u.size());
            const double q = diversification_return(u, w);
            EXPECT_NEAR(q, 0.5 * w.dot(D * w), 1e-12 * std::max(1.0, w.squaredNorm()));
            EXPECT_NEAR(q, testsupport::q_direct(u.covariance(), w), 1e-14 * std::max(1.0, w.squaredNorm()));
        }
    }
}

TEST(PortfolioStats, EqualWeightsOnThreeAssetExample) {
    const auto u = testsupport::three_asset();
    const auto e = embed(u);
    const auto p = portfolio_stats(u, VectorXd::Constant(3, 1.0 / 3.0), &e);
    EXPECT_NEAR(p.variance, 1.0, 1e-14);
    EXPECT_NEAR(p.dr, 5.0 / 9.0, 1e-14);
    ASSERT_TRUE(p.centrality_sq);
    EXPECT_NEAR(*p.centrality_sq, 4.0 / 9.0, 1e-12);
    EXPECT_FALSE(p.expected_return);

    const auto first = portfolio_stats(u, VectorXd::Unit(3, 0));
    EXPECT_NEAR(first.dr, 0.0, 1e-15);
    EXPECT_NEAR(first.variance, 11.0 / 9.0, 1e-15);
}

TEST(PortfolioStats, ExpectedReturnAndEmbeddingGuard) {
    VectorXd rbar(3);
    rbar << 0.1, 0.2, 0.3;
    const auto u = validate_universe(testsupport::three_asset_v(), rbar);
    const auto p = portfolio_stats(u, VectorXd::Constant(3, 1.0 / 3.0));
    ASSERT_TRUE(p.expected_return);
    EXPECT_NEAR(*p.expected_return, 0.2, 1e-15);

    const auto other = validate_universe(MatrixXd::Identity(3, 3));
    const auto e = embed(other);
    EXPECT_EQ(code_of([&] { portfolio_stats(u, VectorXd::Constant(3, 1.0 / 3.0), &e); }),
              ErrorCode::EmbeddingMismatch);
}

TEST(PortfolioStats, CentralityPlusDrIsConstant) {
    testsupport::Gen gen(13);
    const auto u = gen.universe(5);
    const auto e = embed(u);
    for (int t = 0; t < 200; ++t) {
        const auto p = portfolio_stats(u, gen.budget_portfolio(5), &e);
        EXPECT_NEAR(*p.centrality_sq + p.dr, e.q_max, 1e-8);
        EXPECT_GE(p.variance, 0.0);
    }
}
