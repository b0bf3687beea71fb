/**
 * @file edm.hpp
 * @brief Distance-matrix view of a covariance matrix and its spherical embedding.
 *
 * For budget-feasible w the diversification return is a quadratic form in
 *
 *     D = 1/2 (eta 1^T + 1 eta^T) - V,     q(w) = 1/2 w^T D w.
 *
 * D is a Euclidean distance matrix. Centering it at s = D^- 1 / (1^T D^- 1)
 * (the maximum-DR portfolio) gives B = -1/2 J_s^T D J_s = X^T X whose columns
 * all lie on the sphere of radius sqrt(q_max), with X s = 0. The distance of
 * X w from the origin is the centrality c(w), and c(w)^2 + q(w) = q_max.
 */
#pragma once

#include "drfrontier/universe.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace drfrontier {

inline constexpr double kEdmNegativeTol = 1e-12;
inline constexpr double kEmbeddingRankTol = 1e-10; // eigenvalue cutoff relative to lambda_1
inline constexpr double kPinvTol = 1e-10;          // singular-value cutoff relative to sigma_1

/// D_ij = (eta_i + eta_j)/2 - V_ij, with exact zero diagonal.
inline MatrixXd build_distance_matrix(const AssetUniverse& u) {
    const VectorXd& eta = u.variances();
    const Index n = u.size();
    MatrixXd D(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            D(i, j) = (i == j) ? 0.0 : 0.5 * (eta(i) + eta(j)) - u.covariance()(i, j);
        }
    }
    const double scale = std::max(eta.maxCoeff(), 1e-300);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            if (D(i, j) < 0.0) {
                if (D(i, j) < -kEdmNegativeTol * scale) {
                    throw Error(ErrorCode::NegativeEntry, "distance matrix entry (" +
                                                              std::to_string(i) + "," +
                                                              std::to_string(j) + ") is negative");
                }
                D(i, j) = 0.0;
            }
        }
    }
    return D;
}

struct EdmCertificate {
    bool is_edm = false;
    /// Smallest eigenvalue of -J D J with J the centering matrix.
    double min_eigenvalue = 0.0;
};

/// Schoenberg test: D is an EDM iff -J D J is positive semidefinite.
inline EdmCertificate assert_edm(const MatrixXd& D) {
    if (D.rows() != D.cols()) throw Error(ErrorCode::NonSquare, "distance matrix is not square");
    const Index n = D.rows();
    const double scale = std::max(D.cwiseAbs().maxCoeff(), 1e-300);
    if (D.diagonal().cwiseAbs().maxCoeff() > kEdmNegativeTol * scale) {
        throw Error(ErrorCode::NonZeroDiagonal, "distance matrix has a nonzero diagonal");
    }
    if ((D - D.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw Error(ErrorCode::Asymmetric, "distance matrix is not symmetric");
    }
    if (D.minCoeff() < -kEdmNegativeTol * scale) {
        throw Error(ErrorCode::NegativeEntry, "distance matrix has negative entries");
    }
    const MatrixXd J = MatrixXd::Identity(n, n) - MatrixXd::Constant(n, n, 1.0 / double(n));
    MatrixXd G = -J * D * J;
    G = 0.5 * (G + G.transpose()).eval();
    const VectorXd lambda = Eigen::SelfAdjointEigenSolver<MatrixXd>(G, Eigen::EigenvaluesOnly)
                                .eigenvalues();
    const double lmax = std::max(lambda.cwiseAbs().maxCoeff(), 1e-300);
    EdmCertificate cert;
    cert.min_eigenvalue = lambda.minCoeff();
    cert.is_edm = cert.min_eigenvalue >= -kPsdTol * lmax;
    return cert;
}

/// Spherical embedding centred at the maximum-DR portfolio.
struct EdmEmbedding {
    MatrixXd D;
    VectorXd s;       ///< maximum-DR weights, sums to 1
    MatrixXd B;       ///< -1/2 J_s^T D J_s
    VectorXd eigvals; ///< positive eigenvalues of B, nonincreasing
    MatrixXd eigvecs; ///< matching orthonormal eigenvectors (n x k)
    MatrixXd X;       ///< k x n coordinates, X^T X = B
    double q_max = 0.0;
    bool used_pseudo_inverse = false;
    std::uint64_t universe_hash = 0;

    Index rank() const { return eigvals.size(); }
    double radius() const { return std::sqrt(q_max); }
};

namespace detail {

/// Returns D^- 1 and whether the SVD pseudo-inverse fallback was taken.
inline std::pair<VectorXd, bool> generalized_inverse_times_ones(const MatrixXd& D) {
    const Index n = D.rows();
    const VectorXd ones = VectorXd::Ones(n);
    Eigen::FullPivLU<MatrixXd> lu(D);
    lu.setThreshold(kPinvTol);
    if (lu.isInvertible()) return {lu.solve(ones), false};
    Eigen::JacobiSVD<MatrixXd> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kPinvTol);
    return {svd.solve(ones), true};
}

}  // namespace detail

inline EdmEmbedding embed(const AssetUniverse& u) {
    EdmEmbedding e;
    e.universe_hash = u.fingerprint();
    e.D = build_distance_matrix(u);
    const Index n = u.size();
    const VectorXd ones = VectorXd::Ones(n);

    auto [y, pinv] = detail::generalized_inverse_times_ones(e.D);
    e.used_pseudo_inverse = pinv;
    const double denom = y.sum();
    const double scale = std::max(e.D.cwiseAbs().maxCoeff(), 1e-300);
    if (!std::isfinite(denom) || std::abs(denom) * scale <= 1e-14 ||
        (e.D * y - ones).cwiseAbs().maxCoeff() > 1e-8) {
        throw Error(ErrorCode::SingularD, "1^T D^- 1 is numerically zero or D D^- 1 != 1");
    }
    e.q_max = 1.0 / (2.0 * denom);
    if (!(e.q_max > 0.0)) {
        throw Error(ErrorCode::NonPositiveQmax, "q_max = " + std::to_string(e.q_max));
    }
    e.s = y / denom;

    const MatrixXd Js = MatrixXd::Identity(n, n) - e.s * ones.transpose();
    e.B = -0.5 * Js.transpose() * e.D * Js;
    e.B = 0.5 * (e.B + e.B.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(e.B);
    const VectorXd& lam = eig.eigenvalues(); // ascending
    const double lambda1 = lam(n - 1);
    Index k = 0;
    for (Index i = n - 1; i >= 0; --i) {
        if (lambda1 > 0.0 && lam(i) > kEmbeddingRankTol * lambda1) ++k;
        else break;
    }
    e.eigvals.resize(k);
    e.eigvecs.resize(n, k);
    for (Index j = 0; j < k; ++j) {
        e.eigvals(j) = lam(n - 1 - j);
        e.eigvecs.col(j) = eig.eigenvectors().col(n - 1 - j);
    }
    e.X = e.eigvals.cwiseSqrt().asDiagonal() * e.eigvecs.transpose();
    return e;
}

/// c(w) = sqrt(w^T B w) = ||X w||. Zero at the maximum-DR portfolio.
inline double centrality(const EdmEmbedding& emb, const VectorXd& w) {
    check_budget(w, emb.B.rows());
    return (emb.X * w).norm();
}

inline double centrality_sq(const EdmEmbedding& emb, const VectorXd& w) {
    check_budget(w, emb.B.rows());
    return (emb.X * w).squaredNorm();
}

/**
 * Lower bound on q implied by an A-norm constraint ||w||_A <= tau.
 *
 * With beta^2 = lambda_min(A) / lambda_max(B), ||w||_A >= beta c(w), so the
 * constraint forces c(w) <= tau/beta and therefore q(w) >= q_max - (tau/beta)^2.
 */
inline double norm_dr_bound(const EdmEmbedding& emb, const MatrixXd& A, double tau) {
    const Index n = emb.B.rows();
    if (A.rows() != n || A.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "norm matrix dimension mismatch");
    }
    if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be nonnegative");
    const double scale = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw Error(ErrorCode::NotSPD, "norm matrix is not symmetric");
    }
    const VectorXd lamA =
        Eigen::SelfAdjointEigenSolver<MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues();
    if (!(lamA(0) > kNonsingularTol * lamA(n - 1))) {
        throw Error(ErrorCode::NotSPD, "norm matrix is not positive definite");
    }
    if (emb.rank() == 0) return emb.q_max;
    const double beta = std::sqrt(lamA(0) / emb.eigvals(0));
    const double radius = tau / beta;
    return emb.q_max - radius * radius;
}

}  // namespace drfrontier
