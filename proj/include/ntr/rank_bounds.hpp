#pragma once

#include "ntr/solvers.hpp"
#include "ntr/tensor.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ntr {

/// Interval [lower, upper] for a nonnegative rank, with an evidence trace.
/// certified means both ends coincide and the lower end is certificate-backed.
struct RankEstimate {
    int lower = 0;
    std::optional<int> upper;
    bool certified = false;
    std::vector<std::string> evidence;

    std::string upper_string(int r_max = -1) const {
        if (upper) return std::to_string(*upper);
        return r_max >= 0 ? ">" + std::to_string(r_max) : "unknown";
    }
};

/// Numerical rank: singular values above tol_rel * sigma_max.
inline int numerical_rank(const Eigen::MatrixXd& m, double tol_rel = 1e-9) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0.0) return 0;
    const double cut = tol_rel * sv[0];
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > cut) ++r;
    return r;
}

/// The 2x2x2 tensor with slices {identity, antidiagonal}: real rank 2 but
/// nonnegative rank 4, the maximum for this shape.
inline Tensor rank4_222_tensor() {
    Tensor t = Tensor::zeros(Shape{2, 2, 2}, true);
    // e1(x)e1(x)e1 + e2(x)e2(x)e1 + e1(x)e2(x)e2 + e2(x)e1(x)e2
    t[t.flat_index(std::array{0, 0, 0})] = 1.0;
    t[t.flat_index(std::array{1, 1, 0})] = 1.0;
    t[t.flat_index(std::array{0, 1, 1})] = 1.0;
    t[t.flat_index(std::array{1, 0, 1})] = 1.0;
    return t;
}

/// Its unique 4-term nonnegative decomposition.
inline Decomposition rank4_222_decomposition() {
    const Shape shape{2, 2, 2};
    auto e = [](int i) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(2);
        v[i] = 1.0;
        return v;
    };
    Decomposition d{shape, DecompMode::nonnegative, {}};
    d.terms.push_back({{e(0), e(0), e(0)}});
    d.terms.push_back({{e(1), e(1), e(0)}});
    d.terms.push_back({{e(0), e(1), e(1)}});
    d.terms.push_back({{e(1), e(0), e(1)}});
    return d;
}

/// Sum of cyclic permutation matrices P_k (x) e_k: every (i, j) tube holds
/// exactly one nonzero, which forces nonnegative rank n^2.
inline Tensor latin_square_tensor(int n) {
    if (n < 2) throw std::invalid_argument("latin_square_tensor: n must be >= 2");
    Tensor t = Tensor::zeros(Shape{n, n, n}, true);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int k = ((j - i) % n + n) % n;  // P_{k+1}(i, j) = 1 iff j - i = k (mod n)
            t[t.flat_index(std::array{i, j, k})] = 1.0;
        }
    return t;
}

inline Eigen::MatrixXd as_matrix(const Tensor& t) {
    if (t.order() != 2) throw std::invalid_argument("as_matrix: tensor must have order 2");
    return flatten(t, 0);
}

inline Tensor matrix_as_tensor(const Eigen::MatrixXd& m, bool nonneg = true) {
    std::vector<double> data(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            data[static_cast<std::size_t>(i) * static_cast<std::size_t>(m.cols()) +
                 static_cast<std::size_t>(j)] = m(i, j);
    return Tensor(Shape{static_cast<int>(m.rows()), static_cast<int>(m.cols())},
                  std::move(data), nonneg);
}

/// Nonnegative rank of a small nonnegative matrix (min dimension <= 6).
/// Lower bound is the numerical real rank; ranks <= 2 certify directly
/// (rank_+ equals rank there); otherwise a feasibility search refines the
/// trivial upper bound min(rows, cols).
inline RankEstimate nonneg_matrix_rank_small(const Eigen::MatrixXd& m,
                                             const SolverConfig& cfg = {}) {
    if (std::min(m.rows(), m.cols()) > 6)
        throw std::invalid_argument("nonneg_matrix_rank_small: min dimension above small-scale cap 6");
    if (m.size() > 0 && m.minCoeff() < 0.0)
        throw std::invalid_argument("nonneg_matrix_rank_small: matrix has negative entries");

    RankEstimate est;
    const int real_rank = numerical_rank(m);
    est.lower = real_rank;
    {
        std::ostringstream os;
        os << "real rank " << real_rank << " from SVD";
        est.evidence.push_back(os.str());
    }
    if (real_rank <= 2) {
        est.upper = real_rank;
        est.certified = true;
        est.evidence.push_back("rank <= 2: nonnegative rank equals real rank");
        return est;
    }
    const int cap = static_cast<int>(std::min(m.rows(), m.cols()));
    est.upper = cap;
    est.evidence.push_back("column factorization gives upper bound " + std::to_string(cap));
    const Tensor t = matrix_as_tensor(m);
    for (int r = real_rank; r < cap; ++r) {
        double res = 0.0;
        if (feasible_fit(t, r, cfg, DecompMode::nonnegative, &res)) {
            est.upper = r;
            std::ostringstream os;
            os << "feasible at r = " << r << " (residual " << res << ")";
            est.evidence.push_back(os.str());
            break;
        }
    }
    est.certified = est.lower == *est.upper;
    return est;
}

/// Exactness certificate from disjoint slice supports: if for some mode the
/// slices of a nonnegative tensor have pairwise disjoint supports, every
/// rank-one term of a nonnegative decomposition feeds exactly one slice
/// (a mode factor with two support indices would force a shared nonzero
/// position), so rank_+(A) is the sum of the slice ranks. Slice ranks are
/// computed recursively with the matrix case as the base.
inline std::optional<int> disjoint_slice_certificate(const Tensor& a) {
    if (!a.nonneg() || !a.entries_nonneg()) return std::nullopt;
    if (a.is_zero()) return 0;
    if (a.order() == 2) {
        if (std::min(a.shape().dim(0), a.shape().dim(1)) > 6) return std::nullopt;
        const RankEstimate est = nonneg_matrix_rank_small(as_matrix(a));
        if (est.certified) return est.lower;
        return std::nullopt;
    }
    for (int mode = 0; mode < a.order(); ++mode) {
        const auto slices = mode_slices(a, mode);
        const std::size_t cells = slices[0].size();
        std::vector<char> seen(cells, 0);
        bool disjoint = true;
        for (const auto& s : slices) {
            for (std::size_t f = 0; f < cells && disjoint; ++f) {
                if (s[f] != 0.0) {
                    if (seen[f]) disjoint = false;
                    seen[f] = 1;
                }
            }
            if (!disjoint) break;
        }
        if (!disjoint) continue;
        int total = 0;
        bool all_certified = true;
        for (const auto& s : slices) {
            const auto sub = disjoint_slice_certificate(s);
            if (!sub) {
                all_certified = false;
                break;
            }
            total += *sub;
        }
        if (all_certified) return total;
    }
    return std::nullopt;
}

/// Bounds on the nonnegative rank: flattening ranks and the slice
/// certificate from below, a feasibility search up to r_max from above.
inline RankEstimate nonneg_rank_bounds(const Tensor& a, int r_max, const SolverConfig& cfg) {
    if (!a.nonneg()) throw std::invalid_argument("nonneg_rank_bounds: tensor not flagged nonnegative");
    RankEstimate est;
    if (a.is_zero()) {
        est.lower = 0;
        est.upper = 0;
        est.certified = true;
        est.evidence.push_back("zero tensor has rank 0");
        return est;
    }
    bool lower_certified = false;
    for (int k = 0; k < a.order(); ++k) {
        const int fr = numerical_rank(flatten(a, k));
        if (fr > est.lower) {
            est.lower = fr;
            lower_certified = true;
            est.evidence.clear();
            std::ostringstream os;
            os << "flattening rank " << fr << " at mode " << (k + 1);
            est.evidence.push_back(os.str());
        }
    }
    if (const auto cert = disjoint_slice_certificate(a)) {
        if (*cert > est.lower) {
            est.lower = *cert;
            std::ostringstream os;
            os << "disjoint-slice certificate gives rank " << *cert;
            est.evidence.push_back(os.str());
        } else if (*cert == est.lower) {
            est.evidence.push_back("disjoint-slice certificate confirms lower bound");
        }
        lower_certified = true;
    }
    const double norm = frobenius_norm(a);
    for (int r = std::max(est.lower, 1); r <= r_max; ++r) {
        double res = 0.0;
        if (feasible_fit(a, r, cfg, DecompMode::nonnegative, &res)) {
            est.upper = r;
            std::ostringstream os;
            os << "feasible at r = " << r << " (residual " << res << ", threshold "
               << cfg.feas_tol * norm << ")";
            est.evidence.push_back(os.str());
            break;
        }
    }
    if (!est.upper) est.evidence.push_back("no feasible fit found up to r_max = " + std::to_string(r_max));
    est.certified = est.upper && est.lower == *est.upper && lower_certified;
    return est;
}

/// Additivity report for rank_+(A (+) B) = rank_+(A) + rank_+(B).
struct DirectSumRankReport {
    RankEstimate a;
    RankEstimate b;
    RankEstimate sum;
    bool additive_consistent = false;  // bound intervals overlap
    bool additive_exact = false;       // all certified and exactly additive
};

inline DirectSumRankReport direct_sum_rank_check(const Tensor& a, const Tensor& b, int r_max,
                                                 const SolverConfig& cfg) {
    DirectSumRankReport rep;
    rep.a = nonneg_rank_bounds(a, r_max, cfg);
    rep.b = nonneg_rank_bounds(b, r_max, cfg);
    rep.sum = nonneg_rank_bounds(direct_sum(a, b), r_max, cfg);
    const int lo = rep.a.lower + rep.b.lower;
    const int hi_a = rep.a.upper ? *rep.a.upper : r_max + 1;
    const int hi_b = rep.b.upper ? *rep.b.upper : r_max + 1;
    const int sum_hi = rep.sum.upper ? *rep.sum.upper : r_max + 1;
    rep.additive_consistent = rep.sum.lower <= hi_a + hi_b && lo <= sum_hi;
    rep.additive_exact = rep.a.certified && rep.b.certified && rep.sum.certified &&
                         rep.sum.lower == lo;
    return rep;
}

/// Maximum nonnegative typical rank of an m x n x p space (m >= n >= p
/// after sorting): np when m = n, n^2 when n = p < m, np when m > n > p.
inline int maxrank_formula(const Shape& shape) {
    if (shape.order() != 3) throw std::invalid_argument("maxrank_formula: order-3 shapes only");
    std::vector<int> d = shape.dims();
    std::sort(d.begin(), d.end(), std::greater<int>());
    const int m = d[0], n = d[1], p = d[2];
    if (m == n) return n * p;
    if (n == p) return n * n;
    return n * p;
}

} // namespace ntr
