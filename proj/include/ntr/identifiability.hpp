#pragma once

#include "ntr/canonical.hpp"
#include "ntr/cells.hpp"
#include "ntr/random.hpp"
#include "ntr/solvers.hpp"
#include "ntr/tensor.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ntr {

enum class Verdict { identifiable, not_identifiable, defective, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::identifiable: return "identifiable";
        case Verdict::not_identifiable: return "not_identifiable";
        case Verdict::defective: return "defective";
        default: return "inconclusive";
    }
}

/// Expected complex generic rank ceil(prod n_i / (1 + sum (n_i - 1))),
/// exact integer arithmetic.
inline int expected_generic_rank(const Shape& shape) {
    const auto num = static_cast<long long>(shape.ambient_dim());
    long long den = 1;
    for (int n : shape.dims()) den += n - 1;
    return static_cast<int>((num + den - 1) / den);
}

/// Expected dimension of the r-th secant set: min(r * (sum n_i - d + 1), prod n_i).
inline int expected_secant_dim(const Shape& shape, int r) {
    const long long cone = shape.dim_sum() - shape.order() + 1;
    const long long expected = static_cast<long long>(r) * cone;
    return static_cast<int>(std::min(expected, static_cast<long long>(shape.ambient_dim())));
}

namespace detail {

inline int jacobian_rank_at_random_point(const Shape& shape, int r, std::uint64_t seed,
                                         Eigen::VectorXd* singvals = nullptr) {
    const int d = shape.order();
    Rng rng(seed);
    std::vector<Eigen::MatrixXd> mats;
    for (int k = 0; k < d; ++k) {
        Eigen::MatrixXd m(shape.dim(k), r);
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.normal();
        mats.push_back(std::move(m));
    }

    const auto ambient = static_cast<Eigen::Index>(shape.ambient_dim());
    const Eigen::Index cols = static_cast<Eigen::Index>(r) * shape.dim_sum();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(ambient, cols);

    // Columns are the rank-one tensors e_alpha (x) (other factors of term i):
    // the derivative of the evaluation map in factor (i, mode k), entry alpha.
    std::vector<int> idx(static_cast<std::size_t>(d));
    Eigen::Index col = 0;
    for (int i = 0; i < r; ++i) {
        for (int k = 0; k < d; ++k) {
            for (int alpha = 0; alpha < shape.dim(k); ++alpha, ++col) {
                for (std::size_t f = 0; f < shape.ambient_dim(); ++f) {
                    std::size_t rem = f;
                    double v = 1.0;
                    bool hit = true;
                    for (int kk = d - 1; kk >= 0; --kk) {
                        const auto n = static_cast<std::size_t>(shape.dim(kk));
                        const int ik = static_cast<int>(rem % n);
                        rem /= n;
                        if (kk == k) {
                            if (ik != alpha) {
                                hit = false;
                                break;
                            }
                        } else {
                            v *= mats[static_cast<std::size_t>(kk)](ik, i);
                        }
                    }
                    if (hit) jac(static_cast<Eigen::Index>(f), col) = v;
                }
            }
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const auto& sv = svd.singularValues();
    if (singvals) *singvals = sv;
    if (sv.size() == 0 || sv[0] == 0.0) return 0;
    const double cut = 1e-9 * sv[0];
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > cut) ++rank;
    return rank;
}

} // namespace detail

/// Terracini test: numerical rank of the Jacobian of the evaluation map at
/// random Gaussian factor tuples, maximized over three trials.
inline int terracini_rank(const Shape& shape, int r, std::uint64_t seed = 1) {
    if (r < 1) throw std::invalid_argument("terracini_rank: r must be >= 1");
    int best = 0;
    for (std::uint64_t trial = 0; trial < 3; ++trial)
        best = std::max(best,
                        detail::jacobian_rank_at_random_point(shape, r, stream_seed(seed, trial)));
    return best;
}

struct DefectivityReport {
    bool defective = false;
    int jacobian_rank = 0;
    int expected_dim = 0;
};

/// r-defectivity over the reals: the secant dimension from the Terracini
/// test falls short of the expected dimension.
inline DefectivityReport is_defective(const Shape& shape, int r, std::uint64_t seed = 1) {
    DefectivityReport rep;
    rep.expected_dim = expected_secant_dim(shape, r);
    rep.jacobian_rank = terracini_rank(shape, r, seed);
    rep.defective = rep.jacobian_rank < rep.expected_dim;
    return rep;
}

struct GenericRankReport {
    std::vector<int> dims;
    int r_g_estimate = 0;
    int expected_r_g = 0;
    std::vector<int> per_r_jacobian_ranks;  // index r-1
};

/// Smallest r whose Terracini rank fills the ambient space.
inline GenericRankReport generic_rank_estimate(const Shape& shape, std::uint64_t seed = 1) {
    if (shape.ambient_dim() > 100000)
        throw std::invalid_argument("generic_rank_estimate: ambient dimension above 1e5");
    GenericRankReport rep;
    rep.dims = shape.dims();
    rep.expected_r_g = expected_generic_rank(shape);
    const int ambient = static_cast<int>(shape.ambient_dim());
    for (int r = 1; r <= ambient; ++r) {
        const int rank = terracini_rank(shape, r, seed);
        rep.per_r_jacobian_ranks.push_back(rank);
        if (rank == ambient) {
            rep.r_g_estimate = r;
            break;
        }
    }
    return rep;
}

/// Chiantini-Ottaviani sufficient identifiability bound r <= 2^(a+b-2),
/// with a, b the largest exponents with 2^a <= smallest dim, 2^b <= second
/// smallest dim; on cubic shapes this dominates floor(n^2/16).
inline bool chiantini_ottaviani(const Shape& shape, int r) {
    if (shape.order() != 3) throw std::invalid_argument("chiantini_ottaviani: order-3 shapes only");
    std::vector<int> d = shape.dims();
    std::sort(d.begin(), d.end());
    int a = 0, b = 0;
    while ((1 << (a + 1)) <= d[0]) ++a;
    while ((1 << (b + 1)) <= d[1]) ++b;
    const long long bound = 1LL << std::max(0, a + b - 2);
    return r <= bound;
}

/// Domanov-De Lathauwer sufficient identifiability condition for m <= n <= p:
/// 2 <= m <= n <= p <= r and 2r <= m + n + 2p - 2 - sqrt((m-n)^2 + 4p).
/// Evaluated in exact integer arithmetic by squaring.
inline bool domanov_delathauwer(const Shape& shape, int r) {
    if (shape.order() != 3) throw std::invalid_argument("domanov_delathauwer: order-3 shapes only");
    std::vector<int> d = shape.dims();
    std::sort(d.begin(), d.end());
    const long long m = d[0], n = d[1], p = d[2];
    if (!(2 <= m && p <= r)) return false;
    const long long s = m + n + 2 * p - 2 - 2 * static_cast<long long>(r);
    if (s < 0) return false;
    return s * s >= (m - n) * (m - n) + 4 * p;
}

/// Table lookup for the known identifiability exceptions below the expected
/// generic rank, plus the generic identifiable verdict when no row applies
/// and the ambient dimension is within the table's validity range.
inline Verdict exception_tables(const Shape& shape, int r) {
    std::vector<int> d = shape.dims();
    std::sort(d.begin(), d.end(), std::greater<int>());
    const int order = static_cast<int>(d.size());

    if (order == 3 && d == std::vector<int>{4, 4, 3} && r == 5) return Verdict::defective;
    if (order == 3 && d == std::vector<int>{4, 4, 4} && r == 6) return Verdict::not_identifiable;
    if (order == 3 && d == std::vector<int>{6, 6, 3} && r == 8) return Verdict::not_identifiable;
    if (order == 4 && d[0] == d[1] && d[2] == 2 && d[3] == 2 && r == 2 * d[0] - 1)
        return Verdict::defective;
    if (order == 5 && d == std::vector<int>{2, 2, 2, 2, 2} && r == 5)
        return Verdict::not_identifiable;

    // unbalanced row: n_1 > prod_{i>=2} n_i - sum_{i>=2} (n_i - 1)
    long long tail_prod = 1, tail_sum = 0;
    for (int i = 1; i < order; ++i) {
        tail_prod *= d[static_cast<std::size_t>(i)];
        tail_sum += d[static_cast<std::size_t>(i)] - 1;
    }
    const long long threshold = tail_prod - tail_sum;
    if (d[0] > threshold && r >= threshold) return Verdict::defective;

    if (r < expected_generic_rank(shape) && shape.ambient_dim() <= 15000)
        return Verdict::identifiable;
    return Verdict::inconclusive;
}

/// Symmetric (Waring) identifiability of S^d(R^(n+1)): identifiable when
/// r < ceil(binom(n+d, d) / (n+1)) and (d, n, r) is not one of the three
/// known exceptions.
inline Verdict symmetric_identifiable(int d, int n, int r) {
    if (d < 2 || n < 1) throw std::invalid_argument("symmetric_identifiable: need d >= 2, n >= 1");
    if ((d == 6 && n == 2 && r == 9) || (d == 4 && n == 3 && r == 8) ||
        (d == 3 && n == 5 && r == 9))
        return Verdict::not_identifiable;
    // binom(n+d, d) with overflow guard
    long double binom = 1.0L;
    for (int i = 1; i <= d; ++i) binom = binom * static_cast<long double>(n + i) / i;
    if (binom > 1e17L) return Verdict::inconclusive;
    const auto b = static_cast<long long>(binom + 0.5L);
    const long long bound = (b + n) / (n + 1);  // ceil(b / (n+1))
    if (r < bound) return Verdict::identifiable;
    return Verdict::inconclusive;
}

/// Aggregated identifiability report for (shape, r).
struct IdentifiabilityReport {
    std::vector<int> dims;
    int r = 0;
    std::map<std::string, std::string> verdicts;
    std::optional<int> jacobian_rank;
    int expected_dim = 0;
    double singular_value_gap = 0.0;  // sv ratio around the rank cut, 0 when full rank
};

inline IdentifiabilityReport identifiability_report(const Shape& shape, int r,
                                                    std::uint64_t seed = 1) {
    IdentifiabilityReport rep;
    rep.dims = shape.dims();
    rep.r = r;
    rep.expected_dim = expected_secant_dim(shape, r);

    if (shape.order() == 3) {
        rep.verdicts["chiantini_ottaviani"] =
            chiantini_ottaviani(shape, r) ? "identifiable" : "inconclusive";
        rep.verdicts["domanov_delathauwer"] =
            domanov_delathauwer(shape, r) ? "identifiable" : "inconclusive";
    }
    const Verdict table = exception_tables(shape, r);
    rep.verdicts["exception_table"] = to_string(table);

    Eigen::VectorXd sv;
    int best_rank = 0;
    for (std::uint64_t trial = 0; trial < 3; ++trial) {
        Eigen::VectorXd sv_t;
        const int rank =
            detail::jacobian_rank_at_random_point(shape, r, stream_seed(seed, trial), &sv_t);
        if (rank > best_rank) {
            best_rank = rank;
            sv = sv_t;
        } else if (sv.size() == 0) {
            sv = sv_t;
        }
    }
    rep.jacobian_rank = best_rank;
    if (best_rank > 0 && best_rank < sv.size() && sv[0] > 0.0)
        rep.singular_value_gap = sv[best_rank] / sv[best_rank - 1];
    rep.verdicts["terracini"] = best_rank < rep.expected_dim ? "defective" : "not_defective";
    return rep;
}

/// Empirical uniqueness evidence from clustering exact-fit restarts.
struct UniquenessVerdict {
    enum class Kind { unique_evidence, non_unique_witness, inconclusive };
    Kind verdict = Kind::inconclusive;
    int clusters = 0;
    int successful_restarts = 0;
    double residual_threshold = 0.0;
    double matched_fraction = 0.0;  // largest cluster / successful restarts
    std::optional<Decomposition> witness_a;  // two exact fits in different clusters
    std::optional<Decomposition> witness_b;
    bool witness_cells_differ = false;
};

inline const char* to_string(UniquenessVerdict::Kind k) {
    switch (k) {
        case UniquenessVerdict::Kind::unique_evidence: return "unique_evidence";
        case UniquenessVerdict::Kind::non_unique_witness: return "non_unique_witness";
        default: return "inconclusive";
    }
}

/// Runs the nonnegative solver restarts, keeps the ones that fit A exactly
/// (residual <= feas_tol * ||A||), canonicalizes them and clusters by
/// term matching. One big cluster with >= 10 members is uniqueness
/// evidence; two clusters are a constructive non-uniqueness witness.
inline UniquenessVerdict uniqueness_by_restarts(const Tensor& a, int r, const SolverConfig& cfg,
                                                double match_tol) {
    UniquenessVerdict out;
    const double norm = frobenius_norm(a);
    out.residual_threshold = cfg.feas_tol * norm;
    const auto runs = solve_all_restarts(a, r, cfg, DecompMode::nonnegative);

    std::vector<Decomposition> reps;           // lexicographically smallest member per cluster
    std::vector<int> cluster_sizes;
    for (const auto& run : runs) {
        if (run.residual > out.residual_threshold) continue;
        ++out.successful_restarts;
        const Decomposition cand = canonicalize(run.decomp, /*allow_zero_terms=*/true);
        bool placed = false;
        for (std::size_t c = 0; c < reps.size(); ++c) {
            if (match_decompositions(reps[c], cand, match_tol, /*allow_zero_terms=*/true).matched) {
                ++cluster_sizes[c];
                if (lex_less(cand, reps[c])) reps[c] = cand;
                placed = true;
                break;
            }
        }
        if (!placed) {
            reps.push_back(cand);
            cluster_sizes.push_back(1);
        }
    }
    out.clusters = static_cast<int>(reps.size());
    if (out.successful_restarts > 0) {
        const int largest = *std::max_element(cluster_sizes.begin(), cluster_sizes.end());
        out.matched_fraction = static_cast<double>(largest) / out.successful_restarts;
    }
    if (out.clusters >= 2) {
        out.verdict = UniquenessVerdict::Kind::non_unique_witness;
        out.witness_a = reps[0];
        out.witness_b = reps[1];
        out.witness_cells_differ = distinct_cells_witness(reps[0], reps[1]);
    } else if (out.clusters == 1 && out.successful_restarts >= 10) {
        out.verdict = UniquenessVerdict::Kind::unique_evidence;
    }
    return out;
}

} // namespace ntr
