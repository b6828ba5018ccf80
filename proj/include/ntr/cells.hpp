#pragma once

#include "ntr/decomposition.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace ntr {

/// Zero-index pattern of a decomposition: for each mode k and term i, the
/// set of coordinates where the factor is numerically zero. The trivial
/// cell has all-positive factors; any nonempty zero set puts the
/// decomposition in a nontrivial cell, i.e. on the boundary.
struct CellPattern {
    std::vector<int> dims;                               // shape echo
    std::vector<std::vector<std::vector<int>>> zero_sets; // [mode][term], 0-based sorted
    double eps_supp = 0.0;
    bool degenerate = false;   // some factor had empty numerical support

    int rank() const { return zero_sets.empty() ? 0 : static_cast<int>(zero_sets[0].size()); }
    int order() const { return static_cast<int>(zero_sets.size()); }

    bool trivial() const {
        for (const auto& mode : zero_sets)
            for (const auto& zs : mode)
                if (!zs.empty()) return false;
        return true;
    }

    bool on_boundary() const { return !trivial(); }

    /// Admissible: in each mode the zero sets of the terms have empty
    /// common intersection.
    bool admissible() const {
        for (std::size_t k = 0; k < zero_sets.size(); ++k) {
            const auto& mode = zero_sets[k];
            if (mode.empty()) continue;
            std::vector<int> common = mode[0];
            for (std::size_t i = 1; i < mode.size() && !common.empty(); ++i) {
                std::vector<int> next;
                std::set_intersection(common.begin(), common.end(), mode[i].begin(),
                                      mode[i].end(), std::back_inserter(next));
                common = std::move(next);
            }
            if (!common.empty()) return false;
        }
        return true;
    }

    /// Per-term pattern across modes, used for unordered multiset comparison.
    std::vector<std::vector<std::vector<int>>> per_term_patterns() const {
        const int r = rank();
        std::vector<std::vector<std::vector<int>>> terms(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i)
            for (const auto& mode : zero_sets)
                terms[static_cast<std::size_t>(i)].push_back(mode[static_cast<std::size_t>(i)]);
        return terms;
    }
};

/// Numerical support extraction: an entry counts as nonzero when it exceeds
/// eps_supp times the factor's max entry. A factor with empty support marks
/// the pattern degenerate rather than raising an error.
inline CellPattern support_pattern(const Decomposition& d, double eps_supp = 1e-7) {
    if (d.mode != DecompMode::nonnegative)
        throw std::invalid_argument("support_pattern: decomposition must be in nonnegative mode");
    validate(d);
    const int order = d.shape.order();
    const int r = d.rank();
    CellPattern p;
    p.dims = d.shape.dims();
    p.eps_supp = eps_supp;
    p.zero_sets.assign(static_cast<std::size_t>(order), {});
    for (int k = 0; k < order; ++k) {
        auto& mode = p.zero_sets[static_cast<std::size_t>(k)];
        mode.resize(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i) {
            const auto& f = d.terms[static_cast<std::size_t>(i)].factors[static_cast<std::size_t>(k)];
            const double cut = eps_supp * f.maxCoeff();
            auto& zs = mode[static_cast<std::size_t>(i)];
            int support = 0;
            for (Eigen::Index j = 0; j < f.size(); ++j) {
                if (f[j] > cut)
                    ++support;
                else
                    zs.push_back(static_cast<int>(j));
            }
            if (support == 0) p.degenerate = true;
        }
    }
    return p;
}

/// Union-of-supports test per mode; a necessary condition for a boundary
/// optimum of a positive tensor.
inline std::vector<bool> support_cover_check(const CellPattern& p) {
    std::vector<bool> covered(static_cast<std::size_t>(p.order()), false);
    for (int k = 0; k < p.order(); ++k) {
        const int n = p.dims[static_cast<std::size_t>(k)];
        std::vector<char> hit(static_cast<std::size_t>(n), 0);
        for (const auto& zs : p.zero_sets[static_cast<std::size_t>(k)]) {
            std::size_t zi = 0;
            for (int j = 0; j < n; ++j) {
                const bool in_zero = zi < zs.size() && zs[zi] == j;
                if (in_zero)
                    ++zi;
                else
                    hit[static_cast<std::size_t>(j)] = 1;
            }
        }
        covered[static_cast<std::size_t>(k)] =
            std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
    }
    return covered;
}

/// Structural non-uniqueness witness: two decompositions of the same tensor
/// lying in distinct cells (patterns differ as unordered multisets).
inline bool distinct_cells_witness(const Decomposition& d1, const Decomposition& d2,
                                   double eps_supp = 1e-7) {
    if (d1.shape != d2.shape || d1.rank() != d2.rank())
        throw std::invalid_argument("distinct_cells_witness: incompatible decompositions");
    auto t1 = support_pattern(d1, eps_supp).per_term_patterns();
    auto t2 = support_pattern(d2, eps_supp).per_term_patterns();
    std::sort(t1.begin(), t1.end());
    std::sort(t2.begin(), t2.end());
    return t1 != t2;
}

enum class Uni23Screen { unique_by_theory, excluded_cell, unknown };

inline const char* to_string(Uni23Screen s) {
    switch (s) {
        case Uni23Screen::unique_by_theory: return "unique_by_theory";
        case Uni23Screen::excluded_cell: return "excluded_cell";
        default: return "unknown";
    }
}

namespace detail {

// The r = 3 configuration that cannot host a best approximation: one pair
// of terms per mode shares a singleton support {c}, and the remaining
// term's zero set is contained in {c}. Checked over all term orderings.
inline bool matches_excluded_r3_cell(const CellPattern& p) {
    if (p.rank() != 3 || p.order() != 3) return false;
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    // mode m pins the pair of (permuted) terms pair_of_mode[m], the third is free
    static const int pair_of_mode[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    static const int free_of_mode[3] = {2, 1, 0};
    for (const auto& perm : perms) {
        bool all_modes_ok = true;
        for (int m = 0; m < 3 && all_modes_ok; ++m) {
            const int n = p.dims[static_cast<std::size_t>(m)];
            const auto& za = p.zero_sets[static_cast<std::size_t>(m)]
                                        [static_cast<std::size_t>(perm[pair_of_mode[m][0]])];
            const auto& zb = p.zero_sets[static_cast<std::size_t>(m)]
                                        [static_cast<std::size_t>(perm[pair_of_mode[m][1]])];
            const auto& zc = p.zero_sets[static_cast<std::size_t>(m)]
                                        [static_cast<std::size_t>(perm[free_of_mode[m]])];
            // pinned pair: equal zero sets of size n-1, i.e. singleton support {c}
            if (static_cast<int>(za.size()) != n - 1 || za != zb) {
                all_modes_ok = false;
                break;
            }
            int c = -1;
            std::size_t zi = 0;
            for (int j = 0; j < n; ++j) {
                if (zi < za.size() && za[zi] == j)
                    ++zi;
                else
                    c = j;
            }
            // free term: zero set empty or exactly {c}
            if (!(zc.empty() || (zc.size() == 1 && zc[0] == c))) {
                all_modes_ok = false;
                break;
            }
        }
        if (all_modes_ok) return true;
    }
    return false;
}

} // namespace detail

/// Cell-level screen for uniqueness of decompositions of best nonnegative
/// rank-2 and rank-3 approximations when all dimensions are >= 3.
inline Uni23Screen uni23_cell_screen(const Shape& shape, int r, const CellPattern& p) {
    if (r != 2 && r != 3) throw std::invalid_argument("uni23_cell_screen: r must be 2 or 3");
    for (int k = 0; k < shape.order(); ++k)
        if (shape.dim(k) < 3)
            throw std::invalid_argument("uni23_cell_screen: all dimensions must be >= 3");
    if (p.rank() != r || p.degenerate) return Uni23Screen::unknown;
    if (!p.admissible()) return Uni23Screen::unknown;
    if (r == 3 && detail::matches_excluded_r3_cell(p)) return Uni23Screen::excluded_cell;
    return Uni23Screen::unique_by_theory;
}

} // namespace ntr
