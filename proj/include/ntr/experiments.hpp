#pragma once

#include "ntr/cells.hpp"
#include "ntr/identifiability.hpp"
#include "ntr/kkt.hpp"
#include "ntr/polynomial.hpp"
#include "ntr/random.hpp"
#include "ntr/rank_bounds.hpp"
#include "ntr/solvers.hpp"
#include "ntr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ntr {

inline Tensor random_uniform_tensor(const Shape& shape, Rng& rng) {
    Tensor t = Tensor::zeros(shape, true);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform01();
    return t;
}

/// Random decomposition with iid uniform(0,1) factor entries; evaluates to
/// the operational "general nonnegative rank-r tensor".
inline Decomposition random_planted_decomposition(const Shape& shape, int r, Rng& rng,
                                                  DecompMode mode = DecompMode::nonnegative) {
    Decomposition d{shape, mode, {}};
    for (int i = 0; i < r; ++i) {
        RankOneTerm term;
        for (int k = 0; k < shape.order(); ++k) {
            Eigen::VectorXd f(shape.dim(k));
            for (Eigen::Index j = 0; j < f.size(); ++j)
                f[j] = mode == DecompMode::nonnegative ? rng.uniform01() : rng.normal();
            term.factors.push_back(std::move(f));
        }
        d.terms.push_back(std::move(term));
    }
    return d;
}

/// Heuristic rank assignment: smallest r <= r_max whose feasibility probe
/// fits the tensor to feas_tol * ||A||; r_max + 1 marks "above r_max".
inline int estimate_rank_upper(const Tensor& a, int r_max, const SolverConfig& cfg,
                               DecompMode mode) {
    if (frobenius_norm(a) == 0.0) return 0;
    for (int r = 1; r <= r_max; ++r)
        if (feasible_fit(a, r, cfg, mode)) return r;
    return r_max + 1;
}

struct RankHistogram {
    std::vector<int> dims;
    int samples = 0;
    int r_max = 0;
    std::uint64_t seed = 0;
    bool real_mode = false;
    SolverConfig cfg;
    std::vector<long long> counts;  // index r = 0..r_max
    long long count_over = 0;       // assigned above r_max
    std::vector<double> fractions;
    double fraction_over = 0.0;
    std::string sampling = "iid uniform(0,1) entries";
    bool heuristic = true;  // ranks are feasibility upper bounds at a fixed restart budget
};

/// Monte Carlo typical-rank histogram over iid uniform(0,1) tensors.
inline RankHistogram typical_rank_histogram(const Shape& shape, int samples, int r_max,
                                            const SolverConfig& cfg, bool real_mode = false) {
    if (samples < 1) throw std::invalid_argument("typical_rank_histogram: samples must be >= 1");
    RankHistogram h;
    h.dims = shape.dims();
    h.samples = samples;
    h.r_max = r_max;
    h.seed = cfg.seed;
    h.real_mode = real_mode;
    h.cfg = cfg;
    h.counts.assign(static_cast<std::size_t>(r_max) + 1, 0);
    const DecompMode mode = real_mode ? DecompMode::real : DecompMode::nonnegative;
    for (int s = 0; s < samples; ++s) {
        Rng rng(stream_seed(cfg.seed, 2 * static_cast<std::uint64_t>(s)));
        const Tensor a = random_uniform_tensor(shape, rng);
        const SolverConfig scfg =
            cfg.with_seed(stream_seed(cfg.seed, 2 * static_cast<std::uint64_t>(s) + 1));
        const int r = estimate_rank_upper(a, r_max, scfg, mode);
        if (r > r_max)
            ++h.count_over;
        else
            ++h.counts[static_cast<std::size_t>(r)];
    }
    for (long long c : h.counts)
        h.fractions.push_back(static_cast<double>(c) / samples);
    h.fraction_over = static_cast<double>(h.count_over) / samples;
    return h;
}

struct BinaryFormReport {
    int degree = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    long long distinct_count = 0;
    double fraction = 0.0;
    double standard_error = 0.0;
    std::string sampling = "iid standard normal coefficients, monomial basis with binomial weights";
};

/// Fraction of random binary forms of degree d with d distinct real roots,
/// i.e. the measure of the maximal-typical-rank locus of S^d(R^2).
inline BinaryFormReport binary_form_experiment(int d, int samples, std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("binary_form_experiment: degree must be >= 2");
    if (samples < 1) throw std::invalid_argument("binary_form_experiment: samples must be >= 1");
    BinaryFormReport rep;
    rep.degree = d;
    rep.samples = samples;
    rep.seed = seed;

    std::vector<double> binom(static_cast<std::size_t>(d) + 1, 1.0);
    for (int i = 1; i <= d; ++i)
        binom[static_cast<std::size_t>(i)] =
            binom[static_cast<std::size_t>(i - 1)] * (d - i + 1) / i;

    std::vector<double> coeffs(static_cast<std::size_t>(d) + 1);
    for (int s = 0; s < samples; ++s) {
        Rng rng(stream_seed(seed, static_cast<std::uint64_t>(s)));
        for (int i = 0; i <= d; ++i)
            coeffs[static_cast<std::size_t>(i)] = rng.normal() * binom[static_cast<std::size_t>(i)];
        if (has_d_distinct_real_roots(coeffs, d)) ++rep.distinct_count;
    }
    rep.fraction = static_cast<double>(rep.distinct_count) / samples;
    rep.standard_error = std::sqrt(std::max(0.0, rep.fraction * (1.0 - rep.fraction) / samples));
    return rep;
}

struct SurveyReport {
    std::vector<int> dims;
    int r = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    SolverConfig cfg;
    double match_tol = 1e-5;
    double eps_supp = 1e-7;

    int converged = 0;  // uniqueness clustering saw >= 10 exact fits
    int on_boundary = 0;
    int unique_evidence = 0;
    int non_unique_witness = 0;
    int inconclusive = 0;
    int converged_nonboundary = 0;
    int unique_among_converged_nonboundary = 0;

    double fraction_on_boundary = 0.0;
    double fraction_unique_evidence = 0.0;
    double fraction_non_unique = 0.0;
    double fraction_inconclusive = 0.0;
    double fraction_unique_among_converged_nonboundary = 0.0;
    double max_kkt_inequality_violation = 0.0;
    double max_kkt_tangent_orthogonality = 0.0;
};

/// For each sampled positive tensor: best nonnegative rank-r approximation,
/// KKT residuals, boundary classification of the approximation, and
/// restart-clustering uniqueness evidence for its decomposition. The
/// clustering stage needs at least 10 exact fits to call anything unique,
/// so it runs with at least 14 restarts and a tightened fit threshold
/// regardless of the base config.
inline SurveyReport approximation_survey(const Shape& shape, int r, int samples,
                                         const SolverConfig& cfg, double match_tol = 1e-5,
                                         double eps_supp = 1e-7) {
    SurveyReport rep;
    rep.dims = shape.dims();
    rep.r = r;
    rep.samples = samples;
    rep.seed = cfg.seed;
    rep.cfg = cfg;
    rep.match_tol = match_tol;
    rep.eps_supp = eps_supp;

    for (int s = 0; s < samples; ++s) {
        Rng rng(stream_seed(cfg.seed, 3 * static_cast<std::uint64_t>(s)));
        const Tensor a = random_uniform_tensor(shape, rng);
        const SolverConfig scfg =
            cfg.with_seed(stream_seed(cfg.seed, 3 * static_cast<std::uint64_t>(s) + 1));
        const ApproximationResult res = nncp_solve(a, r, scfg);
        const KktReport kkt = kkt_residuals(a, res.best, eps_supp);
        rep.max_kkt_inequality_violation =
            std::max(rep.max_kkt_inequality_violation, kkt.max_inequality_violation);
        rep.max_kkt_tangent_orthogonality =
            std::max(rep.max_kkt_tangent_orthogonality, kkt.tangent_orthogonality);
        const CellPattern pattern = support_pattern(res.best, eps_supp);
        const bool boundary = pattern.on_boundary();
        if (boundary) ++rep.on_boundary;

        Tensor approx = evaluate(res.best);
        SolverConfig ucfg =
            cfg.with_seed(stream_seed(cfg.seed, 3 * static_cast<std::uint64_t>(s) + 2));
        ucfg.restarts = std::max(cfg.restarts, 14);
        ucfg.max_outer_iters = std::max(cfg.max_outer_iters, 6000);
        ucfg.feas_tol = std::min(cfg.feas_tol, 1e-9);
        const UniquenessVerdict uv = uniqueness_by_restarts(approx, r, ucfg, match_tol);
        const bool conv = uv.successful_restarts >= 10;
        if (conv) ++rep.converged;
        switch (uv.verdict) {
            case UniquenessVerdict::Kind::unique_evidence: ++rep.unique_evidence; break;
            case UniquenessVerdict::Kind::non_unique_witness: ++rep.non_unique_witness; break;
            default: ++rep.inconclusive; break;
        }
        if (conv && !boundary) {
            ++rep.converged_nonboundary;
            if (uv.verdict == UniquenessVerdict::Kind::unique_evidence)
                ++rep.unique_among_converged_nonboundary;
        }
    }
    rep.fraction_on_boundary = static_cast<double>(rep.on_boundary) / samples;
    rep.fraction_unique_evidence = static_cast<double>(rep.unique_evidence) / samples;
    rep.fraction_non_unique = static_cast<double>(rep.non_unique_witness) / samples;
    rep.fraction_inconclusive = static_cast<double>(rep.inconclusive) / samples;
    rep.fraction_unique_among_converged_nonboundary =
        rep.converged_nonboundary == 0
            ? 0.0
            : static_cast<double>(rep.unique_among_converged_nonboundary) /
                  rep.converged_nonboundary;
    return rep;
}

struct ExplicitCoincidenceReport {
    int flattening_lower = 0;
    double real_residual = 0.0;
    double nonneg_residual = 0.0;
    bool real_fit = false;
    bool nonneg_fit = false;
    bool coincident = false;
};

struct CoincidenceReport {
    std::vector<int> dims;
    int r = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    SolverConfig cfg;
    int real_fit = 0;           // real ALS reaches feas_tol at rank r
    int flattening_match = 0;   // max flattening rank equals r
    int coincident = 0;
    double fraction = 0.0;
    std::optional<ExplicitCoincidenceReport> explicit_report;
};

inline int max_flattening_rank(const Tensor& a) {
    int best = 0;
    for (int k = 0; k < a.order(); ++k) best = std::max(best, numerical_rank(flatten(a, k)));
    return best;
}

/// Checks real/nonnegative rank coincidence on planted nonnegative rank-r
/// tensors: real ALS fits at rank r (real rank <= r) and the flattening
/// lower bound equals r (real rank >= r).
inline CoincidenceReport rank_coincidence_experiment(const Shape& shape, int r, int samples,
                                                     const SolverConfig& cfg,
                                                     const Tensor* explicit_tensor = nullptr) {
    CoincidenceReport rep;
    rep.dims = shape.dims();
    rep.r = r;
    rep.samples = samples;
    rep.seed = cfg.seed;
    rep.cfg = cfg;
    for (int s = 0; s < samples; ++s) {
        Rng rng(stream_seed(cfg.seed, 2 * static_cast<std::uint64_t>(s)));
        const Decomposition plant = random_planted_decomposition(shape, r, rng);
        const Tensor a = evaluate(plant);
        const SolverConfig scfg =
            cfg.with_seed(stream_seed(cfg.seed, 2 * static_cast<std::uint64_t>(s) + 1));
        const bool fit = feasible_fit(a, r, scfg, DecompMode::real);
        const bool flat = max_flattening_rank(a) == r;
        if (fit) ++rep.real_fit;
        if (flat) ++rep.flattening_match;
        if (fit && flat) ++rep.coincident;
    }
    rep.fraction = samples > 0 ? static_cast<double>(rep.coincident) / samples : 0.0;

    if (explicit_tensor) {
        ExplicitCoincidenceReport ex;
        ex.flattening_lower = max_flattening_rank(*explicit_tensor);
        const SolverConfig scfg = cfg.with_seed(stream_seed(cfg.seed, 0x0ebbu));
        ex.real_fit = feasible_fit(*explicit_tensor, r, scfg, DecompMode::real, &ex.real_residual);
        if (explicit_tensor->nonneg())
            ex.nonneg_fit = feasible_fit(*explicit_tensor, r, scfg, DecompMode::nonnegative,
                                         &ex.nonneg_residual);
        ex.coincident = ex.real_fit && ex.nonneg_fit && ex.flattening_lower == r;
        rep.explicit_report = ex;
    }
    return rep;
}

} // namespace ntr
