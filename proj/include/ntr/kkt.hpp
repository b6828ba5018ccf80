#pragma once

#include "ntr/decomposition.hpp"
#include "ntr/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ntr {

/// First-order optimality residuals of a candidate best nonnegative rank-r
/// approximation q of p. For every term i and mode k the probe directions
/// are the coordinate rank-one tensors e_a (x) (other factors of term i),
/// normalized to unit Frobenius norm so tolerances are scale-free:
///   - inequality:        <q - p, probe> >= 0 must hold for all a,
///   - support equality:  <q - p, probe> = 0 on the numerical support,
///   - tangent test:      p - q orthogonal to the span of all supported probes.
struct KktReport {
    // per (term, mode) worst values
    std::vector<std::vector<double>> inequality_violation;       // [term][mode], >= 0
    std::vector<std::vector<double>> support_equality_residual;  // [term][mode], >= 0
    double max_inequality_violation = 0.0;
    double max_support_equality_residual = 0.0;
    double tangent_orthogonality = 0.0;
    double eps_supp = 0.0;
};

inline KktReport kkt_residuals(const Tensor& a, const Decomposition& candidate,
                               double eps_supp = 1e-7) {
    if (candidate.mode != DecompMode::nonnegative)
        throw std::invalid_argument("kkt_residuals: candidate must be in nonnegative mode");
    if (candidate.shape != a.shape())
        throw std::invalid_argument("kkt_residuals: shape mismatch");

    const int d = a.order();
    const int r = candidate.rank();
    const Tensor q = evaluate(candidate);
    const Tensor diff = q - a;  // q - p

    KktReport rep;
    rep.eps_supp = eps_supp;
    rep.inequality_violation.assign(static_cast<std::size_t>(r),
                                    std::vector<double>(static_cast<std::size_t>(d), 0.0));
    rep.support_equality_residual.assign(static_cast<std::size_t>(r),
                                         std::vector<double>(static_cast<std::size_t>(d), 0.0));

    const auto mats = factor_matrices(candidate);
    for (int k = 0; k < d; ++k) {
        const Eigen::MatrixXd unfolded = flatten(diff, k);  // n_k x prod(other)
        const Eigen::MatrixXd z = khatri_rao_skip(mats, k); // prod(other) x r
        const Eigen::MatrixXd s = unfolded * z;             // s(a, i) = <q - p, e_a (x) others_i>
        for (int i = 0; i < r; ++i) {
            double probe_norm = 1.0;
            for (int j = 0; j < d; ++j)
                if (j != k) probe_norm *= mats[static_cast<std::size_t>(j)].col(i).norm();
            if (probe_norm == 0.0) continue;  // degenerate term, probes vanish

            const auto& u = mats[static_cast<std::size_t>(k)].col(i);
            const double supp_cut = eps_supp * u.maxCoeff();
            double viol = 0.0, supp_res = 0.0;
            for (Eigen::Index alpha = 0; alpha < u.size(); ++alpha) {
                const double val = s(alpha, i) / probe_norm;
                viol = std::max(viol, -val);
                if (u[alpha] > supp_cut) supp_res = std::max(supp_res, std::abs(val));
            }
            rep.inequality_violation[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = viol;
            rep.support_equality_residual[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                supp_res;
            rep.max_inequality_violation = std::max(rep.max_inequality_violation, viol);
            rep.max_support_equality_residual =
                std::max(rep.max_support_equality_residual, supp_res);
        }
    }
    // The supported probes span the tangent space of the smooth locus at q,
    // so the worst supported equality residual is the tangent orthogonality.
    rep.tangent_orthogonality = rep.max_support_equality_residual;
    return rep;
}

} // namespace ntr
