#pragma once

#include "ntr/tensor.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <utility>
#include <vector>

namespace ntr {

enum class DecompMode { real, nonnegative };

inline const char* to_string(DecompMode m) {
    return m == DecompMode::real ? "real" : "nonnegative";
}

/// One rank-one summand u^(1) (x) ... (x) u^(d).
struct RankOneTerm {
    std::vector<Eigen::VectorXd> factors;

    bool is_zero() const {
        for (const auto& f : factors)
            if (f.isZero(0.0)) return true;
        return false;
    }
};

/// An ordered list of rank-one terms with a declared shape and mode.
/// Nonnegative mode promises entrywise nonnegative factors.
struct Decomposition {
    Shape shape;
    DecompMode mode = DecompMode::nonnegative;
    std::vector<RankOneTerm> terms;

    int rank() const { return static_cast<int>(terms.size()); }
};

inline void validate(const Decomposition& d) {
    const int order = d.shape.order();
    for (const auto& term : d.terms) {
        if (static_cast<int>(term.factors.size()) != order)
            throw std::invalid_argument("Decomposition: term order does not match shape");
        for (int k = 0; k < order; ++k) {
            if (term.factors[static_cast<std::size_t>(k)].size() != d.shape.dim(k))
                throw std::invalid_argument("Decomposition: factor length does not match shape");
            if (d.mode == DecompMode::nonnegative &&
                term.factors[static_cast<std::size_t>(k)].minCoeff() < 0.0)
                throw std::invalid_argument("Decomposition: negative factor entry in nonnegative mode");
        }
    }
}

/// The evaluation map: sum of the outer products of the factor tuples.
inline Tensor evaluate(const Decomposition& d) {
    validate(d);
    Tensor out = Tensor::zeros(d.shape, d.mode == DecompMode::nonnegative);
    const int order = d.shape.order();
    std::vector<int> idx(static_cast<std::size_t>(order));
    for (const auto& term : d.terms) {
        for (std::size_t f = 0; f < out.size(); ++f) {
            out.unflatten(f, idx);
            double v = 1.0;
            for (int k = 0; k < order; ++k)
                v *= term.factors[static_cast<std::size_t>(k)][idx[static_cast<std::size_t>(k)]];
            out[f] += v;
        }
    }
    return out;
}

inline Tensor evaluate_term(const RankOneTerm& term, const Shape& shape, DecompMode mode) {
    Decomposition d{shape, mode, {term}};
    return evaluate(d);
}

/// Factor-matrix view: mode-k matrix is n_k x r with term i in column i.
inline std::vector<Eigen::MatrixXd> factor_matrices(const Decomposition& d) {
    const int order = d.shape.order();
    const int r = d.rank();
    std::vector<Eigen::MatrixXd> mats;
    mats.reserve(static_cast<std::size_t>(order));
    for (int k = 0; k < order; ++k) {
        Eigen::MatrixXd m(d.shape.dim(k), r);
        for (int i = 0; i < r; ++i)
            m.col(i) = d.terms[static_cast<std::size_t>(i)].factors[static_cast<std::size_t>(k)];
        mats.push_back(std::move(m));
    }
    return mats;
}

inline Decomposition from_factor_matrices(const Shape& shape, DecompMode mode,
                                          const std::vector<Eigen::MatrixXd>& mats) {
    const int order = shape.order();
    if (static_cast<int>(mats.size()) != order)
        throw std::invalid_argument("from_factor_matrices: mode count mismatch");
    const int r = mats.empty() ? 0 : static_cast<int>(mats[0].cols());
    Decomposition d{shape, mode, {}};
    d.terms.resize(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
        auto& term = d.terms[static_cast<std::size_t>(i)];
        term.factors.resize(static_cast<std::size_t>(order));
        for (int k = 0; k < order; ++k)
            term.factors[static_cast<std::size_t>(k)] = mats[static_cast<std::size_t>(k)].col(i);
    }
    return d;
}

/// Khatri-Rao product of all factor matrices except the skipped mode, row
/// order matching the column order of flatten(., mode): remaining modes in
/// original order, last one fastest.
inline Eigen::MatrixXd khatri_rao_skip(const std::vector<Eigen::MatrixXd>& mats, int skip) {
    const int d = static_cast<int>(mats.size());
    Eigen::Index r = 0;
    for (int k = 0; k < d; ++k)
        if (k != skip) { r = mats[static_cast<std::size_t>(k)].cols(); break; }
    Eigen::MatrixXd z = Eigen::MatrixXd::Ones(1, r);
    for (int k = 0; k < d; ++k) {
        if (k == skip) continue;
        const auto& u = mats[static_cast<std::size_t>(k)];
        Eigen::MatrixXd nz(z.rows() * u.rows(), r);
        for (Eigen::Index a = 0; a < z.rows(); ++a)
            for (Eigen::Index b = 0; b < u.rows(); ++b)
                nz.row(a * u.rows() + b) = z.row(a).cwiseProduct(u.row(b));
        z = std::move(nz);
    }
    return z;
}

} // namespace ntr
