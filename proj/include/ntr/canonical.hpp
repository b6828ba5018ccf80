#pragma once

#include "ntr/assignment.hpp"
#include "ntr/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ntr {

/// Result of matching two decompositions up to permutation and scaling.
struct MatchResult {
    bool matched = false;
    std::vector<int> assignment;   // term i of D1 -> assigned term of D2 (0-based)
    double max_term_distance = 0.0;
};

namespace detail {

inline bool term_less(const RankOneTerm& a, const RankOneTerm& b) {
    const std::size_t d = a.factors.size();
    for (std::size_t k = 0; k < d; ++k) {
        const auto& fa = a.factors[k];
        const auto& fb = b.factors[k];
        for (Eigen::Index j = 0; j < fa.size(); ++j) {
            if (fa[j] < fb[j]) return true;
            if (fa[j] > fb[j]) return false;
        }
    }
    return false;
}

} // namespace detail

/// Lexicographic order on decompositions by concatenated factor entries,
/// used as a deterministic tie-break for cluster representatives.
inline bool lex_less(const Decomposition& a, const Decomposition& b) {
    const std::size_t n = std::min(a.terms.size(), b.terms.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (detail::term_less(a.terms[i], b.terms[i])) return true;
        if (detail::term_less(b.terms[i], a.terms[i])) return false;
    }
    return a.terms.size() < b.terms.size();
}

/// Normal form for the scaling/permutation gauge: all factors but the last
/// are unit norm with nonnegative leading entry (real mode), the full scale
/// sits in the last factor, and terms are sorted lexicographically.
inline Decomposition canonicalize(const Decomposition& d, bool allow_zero_terms = false) {
    validate(d);
    Decomposition out = d;
    const int order = d.shape.order();
    for (auto& term : out.terms) {
        if (term.is_zero()) {
            if (!allow_zero_terms)
                throw std::invalid_argument("canonicalize: zero term present");
            for (auto& f : term.factors) f.setZero();
            continue;
        }
        double carry = 1.0;
        for (int k = 0; k + 1 < order; ++k) {
            auto& f = term.factors[static_cast<std::size_t>(k)];
            const double nrm = f.norm();
            // skip a no-op rescale so the normal form is an exact fixed point
            if (std::abs(nrm - 1.0) > 1e-14) {
                f /= nrm;
                carry *= nrm;
            }
            if (d.mode == DecompMode::real) {
                // Sign gauge: nonnegative leading nonzero entry.
                for (Eigen::Index j = 0; j < f.size(); ++j) {
                    if (std::abs(f[j]) > 1e-12) {
                        if (f[j] < 0.0) {
                            f = -f;
                            carry = -carry;
                        }
                        break;
                    }
                }
            }
        }
        term.factors[static_cast<std::size_t>(order - 1)] *= carry;
    }
    std::sort(out.terms.begin(), out.terms.end(), detail::term_less);
    return out;
}

/// Min-cost matching of canonicalized terms by Euclidean distance of the
/// evaluated rank-one tensors, which is invariant under the scaling gauge.
inline MatchResult match_decompositions(const Decomposition& d1, const Decomposition& d2,
                                        double tol, bool allow_zero_terms = false) {
    if (d1.shape != d2.shape)
        throw std::invalid_argument("match_decompositions: shape mismatch");
    if (d1.rank() != d2.rank())
        throw std::invalid_argument("match_decompositions: term count mismatch");
    const int r = d1.rank();
    MatchResult res;
    if (r == 0) {
        res.matched = true;
        return res;
    }
    const Decomposition c1 = canonicalize(d1, allow_zero_terms);
    const Decomposition c2 = canonicalize(d2, allow_zero_terms);

    std::vector<Tensor> t1, t2;
    t1.reserve(static_cast<std::size_t>(r));
    t2.reserve(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
        t1.push_back(evaluate_term(c1.terms[static_cast<std::size_t>(i)], d1.shape, DecompMode::real));
        t2.push_back(evaluate_term(c2.terms[static_cast<std::size_t>(i)], d2.shape, DecompMode::real));
    }
    Eigen::MatrixXd cost(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            cost(i, j) = frobenius_norm(t1[static_cast<std::size_t>(i)] - t2[static_cast<std::size_t>(j)]);

    res.assignment = min_cost_assignment(cost);
    double worst = 0.0;
    for (int i = 0; i < r; ++i)
        worst = std::max(worst, cost(i, res.assignment[static_cast<std::size_t>(i)]));
    res.max_term_distance = worst;
    res.matched = worst <= tol;
    return res;
}

} // namespace ntr
