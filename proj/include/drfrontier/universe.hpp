/**
 * @file universe.hpp
 * @brief Validated asset universe and the diversification-return functional.
 *
 * The diversification return of a budget-feasible portfolio w is
 *
 *     q(w) = 1/2 (eta^T w - w^T V w),   eta = diag(V)
 *
 * i.e. half the gap between the weighted-average asset variance and the
 * portfolio variance. V is taken as already annualized; see ingest.hpp for
 * the annualization of sample moments.
 */
#pragma once

#include "drfrontier/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace drfrontier {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kSymmetryTol = 1e-12;    // relative
inline constexpr double kPsdTol = 1e-10;         // relative to lambda_max
inline constexpr double kNonsingularTol = 1e-12; // lambda_min / lambda_max
inline constexpr double kBudgetTol = 1e-10;      // absolute
inline constexpr double kProportionalTol = 1e-12;

namespace detail {

inline std::uint64_t fnv1a(const void* data, std::size_t bytes,
                           std::uint64_t h = 1469598103934665603ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t hash_matrix(const MatrixXd& m) {
    std::uint64_t h = 1469598103934665603ULL;
    const std::int64_t dims[2] = {m.rows(), m.cols()};
    h = fnv1a(dims, sizeof(dims), h);
    return fnv1a(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()), h);
}

/// Relative residual of v after projecting out the all-ones direction.
inline double ones_residual(const VectorXd& v) {
    const double norm = v.norm();
    if (norm == 0.0) return 0.0;
    const VectorXd centered = v.array() - v.mean();
    return centered.norm() / norm;
}

inline bool proportional_to_ones(const VectorXd& v, double tol = kProportionalTol) {
    return ones_residual(v) <= tol;
}

}  // namespace detail

/**
 * Covariance matrix V (annualized), its variance vector eta = diag(V),
 * optional expected returns and optional risk-free rate.
 *
 * Only constructible through validate_universe(). Immutable; copies share the
 * cached Cholesky factor, so every V^{-1} application is a pair of triangular
 * solves.
 */
class AssetUniverse {
public:
    Index size() const noexcept { return V_.rows(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const MatrixXd& covariance() const noexcept { return V_; }
    const VectorXd& variances() const noexcept { return eta_; }
    const std::optional<VectorXd>& expected_returns() const noexcept { return rbar_; }
    const std::optional<double>& risk_free_rate() const noexcept { return r0_; }

    /// True when the smallest eigenvalue exceeds kNonsingularTol * largest.
    bool nonsingular() const noexcept { return chol_ != nullptr; }
    double min_eigenvalue() const noexcept { return lambda_min_; }
    double max_eigenvalue() const noexcept { return lambda_max_; }
    std::uint64_t fingerprint() const noexcept { return hash_; }

    /// V^{-1} rhs. Throws SingularCovariance for PSD-only universes.
    VectorXd solve(const VectorXd& rhs) const {
        require_nonsingular();
        return chol_->solve(rhs);
    }

    void require_nonsingular() const {
        if (!chol_) {
            throw Error(ErrorCode::SingularCovariance,
                        "covariance matrix is singular (lambda_min/lambda_max <= 1e-12)");
        }
    }

    const VectorXd& returns_or_throw() const {
        if (!rbar_) throw Error(ErrorCode::MissingReturns, "expected returns are required");
        return *rbar_;
    }

    /// Same covariance, different return inputs (no revalidation of V needed).
    AssetUniverse with_returns(std::optional<VectorXd> rbar, std::optional<double> r0) const;

private:
    friend AssetUniverse validate_universe(MatrixXd, std::optional<VectorXd>, std::optional<double>,
                                           std::vector<std::string>);
    AssetUniverse() = default;

    std::vector<std::string> names_;
    MatrixXd V_;
    VectorXd eta_;
    std::optional<VectorXd> rbar_;
    std::optional<double> r0_;
    double lambda_min_ = 0.0;
    double lambda_max_ = 0.0;
    std::uint64_t hash_ = 0;
    std::shared_ptr<const Eigen::LLT<MatrixXd>> chol_;
};

/// Weight vector with derived statistics.
struct Portfolio {
    VectorXd weights;
    double variance = 0.0;
    double dr = 0.0;
    std::optional<double> centrality_sq;
    std::optional<double> expected_return;

    double sigma() const { return std::sqrt(std::max(variance, 0.0)); }
};

/**
 * Validates and packages a covariance matrix.
 *
 * Asymmetry up to 1e-12 (relative to max |V_ij|) is repaired by (V+V^T)/2;
 * anything larger is an error. Eigenvalues in [-1e-10 lambda_max, 0) are
 * clamped to zero and V rebuilt from its spectrum; eta is read from the final V.
 */
inline AssetUniverse validate_universe(MatrixXd raw, std::optional<VectorXd> rbar = std::nullopt,
                                       std::optional<double> r0 = std::nullopt,
                                       std::vector<std::string> names = {}) {
    if (raw.rows() != raw.cols()) {
        throw Error(ErrorCode::NonSquare, "covariance is " + std::to_string(raw.rows()) + "x" +
                                              std::to_string(raw.cols()));
    }
    const Index n = raw.rows();
    if (n < 2) throw Error(ErrorCode::DimensionMismatch, "at least two assets are required");
    if (!raw.allFinite()) throw Error(ErrorCode::NotPSD, "covariance has non-finite entries");

    const double scale = raw.cwiseAbs().maxCoeff();
    const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol * std::max(scale, 1e-300)) {
        throw Error(ErrorCode::Asymmetric,
                    "relative asymmetry " + std::to_string(asym / scale) + " exceeds 1e-12");
    }
    MatrixXd V = 0.5 * (raw + raw.transpose());

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(V);
    VectorXd lambda = eig.eigenvalues();
    const double lmax = std::max(lambda.maxCoeff(), 0.0);
    const double lmin = lambda.minCoeff();
    if (lmin < -kPsdTol * lmax || (lmax == 0.0 && lmin < 0.0)) {
        throw Error(ErrorCode::NotPSD, "smallest eigenvalue " + std::to_string(lmin) +
                                           " below -1e-10 * lambda_max");
    }
    if (lmin < 0.0) {
        lambda = lambda.cwiseMax(0.0);
        V = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
        V = 0.5 * (V + V.transpose()).eval();
    }

    if (rbar && rbar->size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "expected returns have length " +
                                                      std::to_string(rbar->size()) + ", expected " +
                                                      std::to_string(n));
    }
    if (!names.empty() && static_cast<Index>(names.size()) != n) {
        throw Error(ErrorCode::DimensionMismatch, "asset name count does not match covariance");
    }
    if (names.empty()) {
        names.reserve(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) names.push_back("A" + std::to_string(i + 1));
    }

    AssetUniverse u;
    u.names_ = std::move(names);
    u.V_ = std::move(V);
    u.eta_ = u.V_.diagonal();
    u.rbar_ = std::move(rbar);
    u.r0_ = r0;
    u.lambda_min_ = std::max(lmin, 0.0);
    u.lambda_max_ = lmax;
    u.hash_ = detail::hash_matrix(u.V_);
    if (lmax > 0.0 && lmin > kNonsingularTol * lmax) {
        auto llt = std::make_shared<Eigen::LLT<MatrixXd>>(u.V_);
        if (llt->info() == Eigen::Success) u.chol_ = std::move(llt);
    }
    return u;
}

inline AssetUniverse AssetUniverse::with_returns(std::optional<VectorXd> rbar,
                                                 std::optional<double> r0) const {
    if (rbar && rbar->size() != size()) {
        throw Error(ErrorCode::DimensionMismatch, "expected returns length mismatch");
    }
    AssetUniverse copy = *this;
    copy.rbar_ = std::move(rbar);
    copy.r0_ = r0;
    return copy;
}

inline void check_budget(const VectorXd& w, Index n) {
    if (w.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "weight vector has length " +
                                                      std::to_string(w.size()) + ", expected " +
                                                      std::to_string(n));
    }
    const double total = w.sum();
    if (!(std::abs(total - 1.0) <= kBudgetTol)) {
        throw Error(ErrorCode::BudgetViolation,
                    "weights sum to " + std::to_string(total) + " (tolerance 1e-10)");
    }
}

/// q(w) = 1/2 (eta^T w - w^T V w) for a budget-feasible w.
inline double diversification_return(const AssetUniverse& u, const VectorXd& w) {
    check_budget(w, u.size());
    return 0.5 * (u.variances().dot(w) - w.dot(u.covariance() * w));
}

}  // namespace drfrontier
