#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ntr {

/// Dimensions (n_1, ..., n_d) of a dense order-d tensor, d >= 2.
class Shape {
public:
    Shape() = default;  // empty placeholder, only for default-initialized fields

    explicit Shape(std::vector<int> dims) : dims_(std::move(dims)) {
        if (dims_.size() < 2)
            throw std::invalid_argument("Shape: order must be at least 2");
        for (int n : dims_)
            if (n < 1) throw std::invalid_argument("Shape: every dimension must be >= 1");
        std::size_t p = 1;
        for (int n : dims_) {
            if (p > (std::size_t{1} << 40) / static_cast<std::size_t>(n))
                throw std::overflow_error("Shape: ambient dimension too large");
            p *= static_cast<std::size_t>(n);
        }
        ambient_ = p;
    }

    Shape(std::initializer_list<int> dims) : Shape(std::vector<int>(dims)) {}

    int order() const { return static_cast<int>(dims_.size()); }
    int dim(int k) const { return dims_.at(static_cast<std::size_t>(k)); }
    const std::vector<int>& dims() const { return dims_; }
    std::size_t ambient_dim() const { return ambient_; }
    int dim_sum() const { return std::accumulate(dims_.begin(), dims_.end(), 0); }

    bool operator==(const Shape& o) const { return dims_ == o.dims_; }
    bool operator!=(const Shape& o) const { return !(*this == o); }

    std::string to_string() const {
        std::string s;
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            if (k) s += "x";
            s += std::to_string(dims_[k]);
        }
        return s;
    }

private:
    std::vector<int> dims_;
    std::size_t ambient_ = 0;
};

/// Dense real tensor, flat row-major storage (last index fastest), with a
/// nonnegativity flag carried as part of the value.
class Tensor {
public:
    Tensor(Shape shape, std::vector<double> data, bool nonneg = false)
        : shape_(std::move(shape)), data_(std::move(data)), nonneg_(nonneg) {
        if (data_.size() != shape_.ambient_dim())
            throw std::invalid_argument("Tensor: data length does not match shape");
    }

    static Tensor zeros(Shape shape, bool nonneg = false) {
        std::vector<double> d(shape.ambient_dim(), 0.0);
        return Tensor(std::move(shape), std::move(d), nonneg);
    }

    const Shape& shape() const { return shape_; }
    int order() const { return shape_.order(); }
    bool nonneg() const { return nonneg_; }
    void set_nonneg(bool v) { nonneg_ = v; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }
    std::size_t size() const { return data_.size(); }

    double operator[](std::size_t flat) const { return data_[flat]; }
    double& operator[](std::size_t flat) { return data_[flat]; }

    /// Entry at a multi-index (0-based internally).
    double at(std::span<const int> idx) const { return data_[flat_index(idx)]; }
    double& at(std::span<const int> idx) { return data_[flat_index(idx)]; }

    std::size_t flat_index(std::span<const int> idx) const {
        if (static_cast<int>(idx.size()) != shape_.order())
            throw std::invalid_argument("Tensor: multi-index order mismatch");
        std::size_t flat = 0;
        for (int k = 0; k < shape_.order(); ++k) {
            if (idx[static_cast<std::size_t>(k)] < 0 || idx[static_cast<std::size_t>(k)] >= shape_.dim(k))
                throw std::out_of_range("Tensor: index out of range");
            flat = flat * static_cast<std::size_t>(shape_.dim(k)) +
                   static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]);
        }
        return flat;
    }

    void unflatten(std::size_t flat, std::span<int> idx) const {
        for (int k = shape_.order() - 1; k >= 0; --k) {
            const auto n = static_cast<std::size_t>(shape_.dim(k));
            idx[static_cast<std::size_t>(k)] = static_cast<int>(flat % n);
            flat /= n;
        }
    }

    /// Entrywise check of the nonnegativity the flag promises.
    bool entries_nonneg() const {
        for (double v : data_)
            if (v < 0.0) return false;
        return true;
    }

    bool is_zero() const {
        for (double v : data_)
            if (v != 0.0) return false;
        return true;
    }

private:
    Shape shape_;
    std::vector<double> data_;
    bool nonneg_;
};

inline void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (a.shape() != b.shape())
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

inline double inner_product(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "inner_product");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double frobenius_norm(const Tensor& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * a[i];
    return std::sqrt(s);
}

/// Block direct sum: shape is the entrywise sum of shapes, A occupies the
/// leading block, B the trailing block, cross blocks are zero.
inline Tensor direct_sum(const Tensor& a, const Tensor& b) {
    if (a.order() != b.order())
        throw std::invalid_argument("direct_sum: order mismatch");
    const int d = a.order();
    std::vector<int> dims(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k)
        dims[static_cast<std::size_t>(k)] = a.shape().dim(k) + b.shape().dim(k);
    Tensor out = Tensor::zeros(Shape(dims), a.nonneg() && b.nonneg());

    std::vector<int> idx(static_cast<std::size_t>(d));
    for (std::size_t f = 0; f < a.size(); ++f) {
        a.unflatten(f, idx);
        out.at(idx) = a[f];
    }
    for (std::size_t f = 0; f < b.size(); ++f) {
        b.unflatten(f, idx);
        for (int k = 0; k < d; ++k) idx[static_cast<std::size_t>(k)] += a.shape().dim(k);
        out.at(idx) = b[f];
    }
    return out;
}

/// Tensor product A (x) u: appends one mode of length u.size().
/// Nonnegative-rank preserving when u is nonnegative and nonzero.
inline Tensor absorb_vector(const Tensor& a, const Eigen::VectorXd& u) {
    if (u.size() == 0 || u.isZero(0.0))
        throw std::invalid_argument("absorb_vector: u must be nonzero");
    if (a.nonneg() && u.minCoeff() < 0.0)
        throw std::invalid_argument("absorb_vector: u must be nonnegative for a nonnegative tensor");
    std::vector<int> dims = a.shape().dims();
    dims.push_back(static_cast<int>(u.size()));
    Tensor out = Tensor::zeros(Shape(dims), a.nonneg());
    std::size_t f = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (Eigen::Index j = 0; j < u.size(); ++j) out[f++] = a[i] * u[j];
    return out;
}

/// Order-(d-1) sections obtained by fixing one index of the given mode.
/// Requires order >= 3 so the sections are tensors themselves.
inline std::vector<Tensor> mode_slices(const Tensor& a, int mode) {
    const int d = a.order();
    if (mode < 0 || mode >= d) throw std::invalid_argument("mode_slices: mode out of range");
    if (d < 3) throw std::invalid_argument("mode_slices: order must be >= 3");
    std::vector<int> sub;
    for (int k = 0; k < d; ++k)
        if (k != mode) sub.push_back(a.shape().dim(k));
    const Shape sub_shape(sub);
    std::vector<Tensor> slices(static_cast<std::size_t>(a.shape().dim(mode)),
                               Tensor::zeros(sub_shape, a.nonneg()));

    std::vector<int> idx(static_cast<std::size_t>(d));
    std::vector<int> ridx(static_cast<std::size_t>(d - 1));
    for (std::size_t f = 0; f < a.size(); ++f) {
        a.unflatten(f, idx);
        int t = 0;
        for (int k = 0; k < d; ++k)
            if (k != mode) ridx[static_cast<std::size_t>(t++)] = idx[static_cast<std::size_t>(k)];
        slices[static_cast<std::size_t>(idx[static_cast<std::size_t>(mode)])].at(ridx) = a[f];
    }
    return slices;
}

/// Mode-k unfolding: rows indexed by the mode, columns by the remaining
/// indices in row-major order (original mode order with k removed).
inline Eigen::MatrixXd flatten(const Tensor& a, int mode) {
    const int d = a.order();
    if (mode < 0 || mode >= d) throw std::invalid_argument("flatten: mode out of range");
    const auto rows = static_cast<Eigen::Index>(a.shape().dim(mode));
    const auto cols = static_cast<Eigen::Index>(a.size() / static_cast<std::size_t>(rows));
    Eigen::MatrixXd m(rows, cols);

    std::vector<int> idx(static_cast<std::size_t>(d));
    for (std::size_t f = 0; f < a.size(); ++f) {
        a.unflatten(f, idx);
        std::size_t c = 0;
        for (int k = 0; k < d; ++k)
            if (k != mode)
                c = c * static_cast<std::size_t>(a.shape().dim(k)) +
                    static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]);
        m(idx[static_cast<std::size_t>(mode)], static_cast<Eigen::Index>(c)) = a[f];
    }
    return m;
}

/// Inverse of flatten for mode k.
inline Tensor unflatten_mode(const Eigen::MatrixXd& m, const Shape& shape, int mode, bool nonneg) {
    Tensor out = Tensor::zeros(shape, nonneg);
    std::vector<int> idx(static_cast<std::size_t>(shape.order()));
    for (std::size_t f = 0; f < out.size(); ++f) {
        out.unflatten(f, idx);
        std::size_t c = 0;
        for (int k = 0; k < shape.order(); ++k)
            if (k != mode)
                c = c * static_cast<std::size_t>(shape.dim(k)) +
                    static_cast<std::size_t>(idx[static_cast<std::size_t>(k)]);
        out[f] = m(idx[static_cast<std::size_t>(mode)], static_cast<Eigen::Index>(c));
    }
    return out;
}

inline Tensor operator-(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "operator-");
    Tensor out = a;
    out.set_nonneg(false);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

inline Tensor operator+(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "operator+");
    Tensor out = a;
    out.set_nonneg(a.nonneg() && b.nonneg());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

} // namespace ntr
