#pragma once

// Independent reference computations. Nothing here calls the closed forms
// under test: portfolios are found by dense search or exhaustive enumeration
// and scored by the defining quadratic forms.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <numbers>
#include <vector>

namespace testsupport {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// 1/2 (eta^T w - w^T V w) straight from the definition.
inline double q_direct(const Mat& V, const Vec& w) {
    return 0.5 * (V.diagonal().dot(w) - w.dot(V * w));
}

/// Risk-free extension as a quadratic form: the riskless asset is an extra
/// coordinate with zero variance, q = 1/2 w~^T D~ w~ with
/// D~ = 1/2 (eta~ 1^T + 1 eta~^T) - V~.
inline double q_block(const Mat& V, const Vec& risky, double w0) {
    const Eigen::Index n = V.rows();
    Mat Vt = Mat::Zero(n + 1, n + 1);
    Vt.topLeftCorner(n, n) = V;
    const Vec eta = Vt.diagonal();
    const Vec one = Vec::Ones(n + 1);
    const Mat Dt = 0.5 * (eta * one.transpose() + one * eta.transpose()) - Vt;
    Vec wt(n + 1);
    wt << risky, w0;
    return 0.5 * wt.dot(Dt * wt);
}

/// Maximizes a smooth periodic function of one angle: dense scan, then golden
/// section inside the best bracket.
inline double argmax_angle(const std::function<double(double)>& f, int scan = 20000) {
    const double two_pi = 2.0 * std::numbers::pi;
    int best = 0;
    double best_val = f(0.0);
    for (int i = 1; i < scan; ++i) {
        const double v = f(two_pi * i / scan);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    double lo = two_pi * (best - 1) / scan;
    double hi = two_pi * (best + 1) / scan;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - g * (hi - lo);
    double d = lo + g * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 100; ++it) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

/// For three assets the set {1^T w = 1, w^T V w = sigma^2} is an ellipse.
/// Parameterized as w(theta) = w0 + r N M^{-1/2} (cos theta, sin theta) with
/// N an orthonormal basis of the budget-neutral plane and w0 the point of the
/// plane with least variance (found by direct inversion).
class FeasibleCircle {
public:
    FeasibleCircle(const Mat& V, double sigma) {
        N_.resize(3, 2);
        N_.col(0) << 1.0, -1.0, 0.0;
        N_.col(1) << 1.0, 1.0, -2.0;
        N_.col(0).normalize();
        N_.col(1).normalize();
        const Vec x = V.fullPivLu().solve(Vec::Ones(3));
        w0_ = x / x.sum();
        const double v0 = w0_.dot(V * w0_);
        const Eigen::SelfAdjointEigenSolver<Mat> es(N_.transpose() * V * N_);
        const Mat m_inv_half =
            es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
            es.eigenvectors().transpose();
        T_ = std::sqrt(std::max(sigma * sigma - v0, 0.0)) * N_ * m_inv_half;
    }

    Vec at(double theta) const {
        return w0_ + T_ * Vec((Vec(2) << std::cos(theta), std::sin(theta)).finished());
    }

    Vec argmax(const std::function<double(const Vec&)>& f) const {
        return at(argmax_angle([&](double t) { return f(at(t)); }));
    }

private:
    Mat N_;
    Vec w0_;
    Mat T_;
};

/// Unconstrained-budget shell {w in R^3 : w^T V w = sigma^2}; the remainder
/// 1 - 1^T w sits in the riskless asset.
class RiskFreeShell {
public:
    RiskFreeShell(const Mat& V, double sigma) {
        const Eigen::SelfAdjointEigenSolver<Mat> es(V);
        T_ = sigma * es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
             es.eigenvectors().transpose();
    }

    Vec at(double theta, double phi) const {
        Vec z(3);
        z << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
        return T_ * z;
    }

    /// Grid over the sphere followed by shrinking pattern search.
    Vec argmax(const std::function<double(const Vec&)>& f) const {
        const double pi = std::numbers::pi;
        double bt = 0.0;
        double bp = 0.0;
        double best = -std::numeric_limits<double>::infinity();
        constexpr int kTheta = 400;
        constexpr int kPhi = 800;
        for (int i = 0; i <= kTheta; ++i) {
            for (int j = 0; j < kPhi; ++j) {
                const double t = pi * i / kTheta;
                const double p = 2.0 * pi * j / kPhi;
                const double v = f(at(t, p));
                if (v > best) {
                    best = v;
                    bt = t;
                    bp = p;
                }
            }
        }
        double step = pi / kTheta;
        while (step > 1e-13) {
            bool moved = false;
            for (const auto& [dt, dp] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0},
                                         {1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}, {-1.0, 1.0}}) {
                const double v = f(at(bt + dt * step, bp + dp * step));
                if (v > best) {
                    best = v;
                    bt += dt * step;
                    bp += dp * step;
                    moved = true;
                }
            }
            if (!moved) step *= 0.5;
        }
        return at(bt, bp);
    }

private:
    Mat T_;
};

/// max 1/2 w^T D w over simplex points whose coordinates are multiples of 1/k.
inline double simplex_grid_max(const Mat& D, int k) {
    const Eigen::Index n = D.rows();
    std::vector<int> c(static_cast<std::size_t>(n), 0);
    double best = 0.0;
    Vec w(n);
    std::function<void(Eigen::Index, int)> rec = [&](Eigen::Index i, int left) {
        if (i == n - 1) {
            c[static_cast<std::size_t>(i)] = left;
            for (Eigen::Index j = 0; j < n; ++j) w(j) = double(c[static_cast<std::size_t>(j)]) / k;
            best = std::max(best, 0.5 * w.dot(D * w));
            return;
        }
        for (int v = 0; v <= left; ++v) {
            c[static_cast<std::size_t>(i)] = v;
            rec(i + 1, left - v);
        }
    };
    rec(0, k);
    return best;
}

/// max 1/2 w^T D w over the 2-simplex sampled on a triangular lattice of step h.
inline double triangle_grid_max(const Mat& D, double h) {
    const int k = static_cast<int>(std::lround(1.0 / h));
    double best = 0.0;
    Vec w(3);
    for (int i = 0; i <= k; ++i) {
        for (int j = 0; i + j <= k; ++j) {
            w << double(i) / k, double(j) / k, double(k - i - j) / k;
            best = std::max(best, 0.5 * w.dot(D * w));
        }
    }
    return best;
}

}  // namespace testsupport
