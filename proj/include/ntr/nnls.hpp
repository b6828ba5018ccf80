#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ntr {

/// Active-set NNLS on the normal equations: minimizes ||Mx - b|| over x >= 0
/// given G = M^T M and h = M^T b (Lawson-Hanson). Terminates with the KKT
/// certificate: x >= 0, gradient >= -tol on the active set and |gradient|
/// <= tol on the free set, where the gradient is Gx - h.
inline Eigen::VectorXd nnls_gram(const Eigen::MatrixXd& g, const Eigen::VectorXd& h,
                                 double tol = 1e-12) {
    const Eigen::Index n = g.rows();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<char> passive(static_cast<std::size_t>(n), 0);
    Eigen::VectorXd w = h;  // negative gradient h - Gx at x = 0

    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff() == 0.0 ? 0.0
                                       : h.cwiseAbs().maxCoeff());
    const double w_tol = tol * scale;
    const int max_pass = 6 * static_cast<int>(n) + 12;

    auto solve_passive = [&](Eigen::VectorXd& z) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index i = 0; i < n; ++i)
            if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
        const auto m = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd gp(m, m);
        Eigen::VectorXd hp(m);
        for (Eigen::Index a = 0; a < m; ++a) {
            hp[a] = h[idx[static_cast<std::size_t>(a)]];
            for (Eigen::Index b = 0; b < m; ++b)
                gp(a, b) = g(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
        }
        Eigen::VectorXd zp = gp.ldlt().solve(hp);
        if (!zp.allFinite() || (gp * zp - hp).cwiseAbs().maxCoeff() > 1e-9 * scale)
            zp = gp.colPivHouseholderQr().solve(hp);
        z.setZero();
        for (Eigen::Index a = 0; a < m; ++a) z[idx[static_cast<std::size_t>(a)]] = zp[a];
    };

    for (int pass = 0; pass < max_pass; ++pass) {
        // pick the most violated active constraint
        Eigen::Index best = -1;
        double best_w = w_tol;
        for (Eigen::Index i = 0; i < n; ++i)
            if (!passive[static_cast<std::size_t>(i)] && w[i] > best_w) {
                best_w = w[i];
                best = i;
            }
        if (best < 0) break;  // KKT satisfied
        passive[static_cast<std::size_t>(best)] = 1;

        Eigen::VectorXd z(n);
        for (int inner = 0; inner <= 2 * n + 2; ++inner) {
            solve_passive(z);
            bool feasible = true;
            double alpha = 1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (passive[static_cast<std::size_t>(i)] && z[i] <= 0.0) {
                    feasible = false;
                    const double denom = x[i] - z[i];
                    if (denom > 0.0) alpha = std::min(alpha, x[i] / denom);
                }
            }
            if (feasible) {
                x = z;
                break;
            }
            for (Eigen::Index i = 0; i < n; ++i)
                if (passive[static_cast<std::size_t>(i)]) x[i] += alpha * (z[i] - x[i]);
            for (Eigen::Index i = 0; i < n; ++i)
                if (passive[static_cast<std::size_t>(i)] && x[i] <= 1e-14 * scale) {
                    x[i] = 0.0;
                    passive[static_cast<std::size_t>(i)] = 0;
                }
        }
        w = h - g * x;
    }
    for (Eigen::Index i = 0; i < n; ++i)
        if (x[i] < 0.0) x[i] = 0.0;
    return x;
}

/// x >= 0 minimizing ||Mx - b||.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& m, const Eigen::VectorXd& b,
                            double tol = 1e-12) {
    if (m.rows() != b.size())
        throw std::invalid_argument("nnls: dimension mismatch between M and b");
    return nnls_gram(m.transpose() * m, m.transpose() * b, tol);
}

} // namespace ntr
