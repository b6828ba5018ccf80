#pragma once

#include "ntr/cells.hpp"
#include "ntr/decomposition.hpp"
#include "ntr/kkt.hpp"
#include "ntr/nnls.hpp"
#include "ntr/random.hpp"
#include "ntr/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ntr {

struct SolverConfig {
    int restarts = 20;
    int max_outer_iters = 2000;
    double inner_tol = 1e-12;
    double stall_tol = 1e-10;
    std::uint64_t seed = 0;
    double feas_tol = 1e-8;  // residual <= feas_tol * ||A|| counts as an exact fit

    SolverConfig with_seed(std::uint64_t s) const {
        SolverConfig c = *this;
        c.seed = s;
        return c;
    }
};

/// Outcome of one alternating-descent restart.
struct RestartRun {
    Decomposition decomp;
    double residual = 0.0;
    std::vector<double> sweep_residuals;
};

/// Best-of-restarts approximation with the full residual trace.
struct ApproximationResult {
    double input_norm = 0.0;
    Decomposition best;
    double residual = 0.0;
    std::vector<double> restart_residuals;
    std::optional<KktReport> kkt;
    std::optional<CellPattern> boundary;
};

namespace detail {

inline std::vector<Eigen::MatrixXd> random_factors(const Shape& shape, int r, DecompMode mode,
                                                   Rng& rng) {
    std::vector<Eigen::MatrixXd> mats;
    mats.reserve(static_cast<std::size_t>(shape.order()));
    for (int k = 0; k < shape.order(); ++k) {
        Eigen::MatrixXd m(shape.dim(k), r);
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                m(i, j) = mode == DecompMode::nonnegative ? rng.uniform01() : rng.normal();
        mats.push_back(std::move(m));
    }
    return mats;
}

inline double model_norm(const std::vector<Eigen::MatrixXd>& mats) {
    const int d = static_cast<int>(mats.size());
    const Eigen::MatrixXd z = khatri_rao_skip(mats, d - 1);
    return (mats[static_cast<std::size_t>(d - 1)] * z.transpose()).norm();
}

/// One alternating sweep across all modes; returns the residual computed
/// from the last mode's fresh unfolding fit. mu_warmup switches the
/// nonnegative subproblem to multiplicative updates, which keep factors
/// strictly positive and so cannot deflate a term to zero early on.
inline double als_sweep(const std::vector<Eigen::MatrixXd>& unfoldings,
                        std::vector<Eigen::MatrixXd>& mats, DecompMode mode, double inner_tol,
                        bool mu_warmup = false) {
    const int d = static_cast<int>(mats.size());
    double residual = 0.0;
    for (int k = 0; k < d; ++k) {
        const Eigen::MatrixXd z = khatri_rao_skip(mats, k);
        auto& u = mats[static_cast<std::size_t>(k)];
        if (mode == DecompMode::nonnegative) {
            const Eigen::MatrixXd g = z.transpose() * z;
            const Eigen::MatrixXd h =
                unfoldings[static_cast<std::size_t>(k)] * z;  // n_k x r
            if (mu_warmup) {
                const Eigen::MatrixXd denom = u * g;
                for (Eigen::Index i = 0; i < u.rows(); ++i)
                    for (Eigen::Index j = 0; j < u.cols(); ++j)
                        u(i, j) = denom(i, j) > 0.0 ? u(i, j) * h(i, j) / denom(i, j) : 0.0;
            } else {
                for (Eigen::Index row = 0; row < u.rows(); ++row)
                    u.row(row) = nnls_gram(g, h.row(row).transpose(), inner_tol).transpose();
            }
        } else {
            u = z.colPivHouseholderQr()
                    .solve(unfoldings[static_cast<std::size_t>(k)].transpose())
                    .transpose();
        }
        if (k == d - 1)
            residual = (unfoldings[static_cast<std::size_t>(k)] - u * z.transpose()).norm();
    }
    return residual;
}

inline double model_residual(const std::vector<Eigen::MatrixXd>& mats,
                             const Eigen::MatrixXd& unfold_last) {
    const int d = static_cast<int>(mats.size());
    const Eigen::MatrixXd z = khatri_rao_skip(mats, d - 1);
    return (unfold_last - mats[static_cast<std::size_t>(d - 1)] * z.transpose()).norm();
}

inline RestartRun run_restart(const Tensor& a, const std::vector<Eigen::MatrixXd>& unfoldings,
                              int r, const SolverConfig& cfg, DecompMode mode,
                              std::uint64_t restart_seed, double input_norm) {
    Rng rng(restart_seed);
    auto mats = random_factors(a.shape(), r, mode, rng);

    // scale the start so the initial model matches the input norm
    const double start_norm = model_norm(mats);
    if (start_norm > 0.0 && input_norm > 0.0) {
        const double s = std::pow(input_norm / start_norm, 1.0 / static_cast<double>(mats.size()));
        for (auto& m : mats) m *= s;
    }

    // residual below this counts as an exact fit, no point polishing further
    const double exact_stop = 0.05 * cfg.feas_tol * input_norm;

    RestartRun run;
    double prev = std::numeric_limits<double>::infinity();
    // line-search extrapolation state (accepted only when it improves the
    // residual, so the recorded sweep residuals stay monotone)
    double accel_pow = 2.0;
    int accel_fail = 0;
    const int warmup = mode == DecompMode::nonnegative
                           ? std::min(60, cfg.max_outer_iters / 4)
                           : 0;
    std::vector<Eigen::MatrixXd> before_sweep;
    for (int outer = 0; outer < cfg.max_outer_iters; ++outer) {
        before_sweep = mats;
        double res = als_sweep(unfoldings, mats, mode, cfg.inner_tol, outer < warmup);
        if (outer >= 2 && res > exact_stop) {
            const double step = std::pow(static_cast<double>(outer + 1), 1.0 / accel_pow) - 1.0;
            std::vector<Eigen::MatrixXd> cand = mats;
            for (std::size_t k = 0; k < cand.size(); ++k) {
                cand[k] += step * (mats[k] - before_sweep[k]);
                if (mode == DecompMode::nonnegative) cand[k] = cand[k].cwiseMax(0.0);
            }
            const double cand_res = model_residual(cand, unfoldings.back());
            if (cand_res < res) {
                mats = std::move(cand);
                res = cand_res;
                accel_fail = 0;
            } else if (++accel_fail >= 4) {
                accel_pow += 1.0;
                accel_fail = 0;
            }
        }
        run.sweep_residuals.push_back(res);
        if (res <= exact_stop) break;
        if (std::isfinite(prev) && prev - res < cfg.stall_tol * std::max(prev, 1e-300)) break;
        prev = res;
    }
    run.residual = run.sweep_residuals.empty() ? input_norm : run.sweep_residuals.back();
    run.decomp = from_factor_matrices(a.shape(), mode, mats);
    if (mode == DecompMode::nonnegative) {
        // clip the occasional -0.0 / rounding debris from the NNLS boundary
        for (auto& term : run.decomp.terms)
            for (auto& f : term.factors)
                f = f.cwiseMax(0.0);
    }
    return run;
}

inline void check_solve_args(const Tensor& a, int r, DecompMode mode) {
    if (r < 1) throw std::invalid_argument("solve: r must be >= 1");
    if (mode == DecompMode::nonnegative && !a.nonneg())
        throw std::invalid_argument("solve: tensor is not flagged nonnegative");
}

} // namespace detail

/// All restarts, each seeded independently from (cfg.seed, restart index).
inline std::vector<RestartRun> solve_all_restarts(const Tensor& a, int r, const SolverConfig& cfg,
                                                  DecompMode mode) {
    detail::check_solve_args(a, r, mode);
    const double input_norm = frobenius_norm(a);
    std::vector<Eigen::MatrixXd> unfoldings;
    for (int k = 0; k < a.order(); ++k) unfoldings.push_back(flatten(a, k));

    std::vector<RestartRun> runs;
    runs.reserve(static_cast<std::size_t>(cfg.restarts));
    for (int t = 0; t < cfg.restarts; ++t)
        runs.push_back(detail::run_restart(a, unfoldings, r, cfg, mode,
                                           stream_seed(cfg.seed, static_cast<std::uint64_t>(t)),
                                           input_norm));
    return runs;
}

namespace detail {

inline ApproximationResult reduce_restarts(const Tensor& a, std::vector<RestartRun> runs) {
    ApproximationResult res;
    res.input_norm = frobenius_norm(a);
    int best = 0;
    for (int t = 0; t < static_cast<int>(runs.size()); ++t) {
        res.restart_residuals.push_back(runs[static_cast<std::size_t>(t)].residual);
        if (runs[static_cast<std::size_t>(t)].residual <
            runs[static_cast<std::size_t>(best)].residual)
            best = t;  // ties keep the lowest restart index
    }
    res.best = std::move(runs[static_cast<std::size_t>(best)].decomp);
    res.residual = runs[static_cast<std::size_t>(best)].residual;
    return res;
}

} // namespace detail

/// Multi-start alternating NNLS for the best nonnegative rank-r approximation.
inline ApproximationResult nncp_solve(const Tensor& a, int r, const SolverConfig& cfg) {
    return detail::reduce_restarts(a, solve_all_restarts(a, r, cfg, DecompMode::nonnegative));
}

/// Multi-start alternating least squares, unconstrained (real mode).
inline ApproximationResult als_solve_real(const Tensor& a, int r, const SolverConfig& cfg) {
    return detail::reduce_restarts(a, solve_all_restarts(a, r, cfg, DecompMode::real));
}

/// First restart that fits A at rank r to within feas_tol * ||A||, if any.
/// Stops at the first success; restart seeding is unchanged, so early exit
/// does not affect which restarts succeed.
inline std::optional<RestartRun> first_exact_fit(const Tensor& a, int r, const SolverConfig& cfg,
                                                 DecompMode mode, double* best_residual = nullptr) {
    detail::check_solve_args(a, r, mode);
    const double input_norm = frobenius_norm(a);
    std::vector<Eigen::MatrixXd> unfoldings;
    for (int k = 0; k < a.order(); ++k) unfoldings.push_back(flatten(a, k));

    double best = input_norm;
    std::optional<RestartRun> hit;
    for (int t = 0; t < cfg.restarts; ++t) {
        auto run = detail::run_restart(a, unfoldings, r, cfg, mode,
                                       stream_seed(cfg.seed, static_cast<std::uint64_t>(t)),
                                       input_norm);
        best = std::min(best, run.residual);
        if (run.residual <= cfg.feas_tol * input_norm) {
            hit = std::move(run);
            break;
        }
    }
    if (best_residual) *best_residual = best;
    return hit;
}

/// Feasibility probe: does some restart fit A at rank r to feas_tol * ||A||?
inline bool feasible_fit(const Tensor& a, int r, const SolverConfig& cfg, DecompMode mode,
                         double* residual_out = nullptr) {
    const double input_norm = frobenius_norm(a);
    if (residual_out) *residual_out = input_norm;
    if (input_norm == 0.0) return true;
    if (r < 1) return false;
    double best = input_norm;
    const auto hit = first_exact_fit(a, r, cfg, mode, &best);
    if (residual_out) *residual_out = best;
    return hit.has_value();
}

} // namespace ntr
