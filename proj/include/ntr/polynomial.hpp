#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ntr {

/// Dense univariate polynomial, coefficients ascending: c[0] + c[1] x + ...
/// Floating-point coefficient arithmetic with relative zero tolerance
/// 1e-10 * max|coeff|.
namespace poly {

constexpr double kZeroRel = 1e-10;

inline double max_abs(const std::vector<double>& c) {
    double m = 0.0;
    for (double v : c) m = std::max(m, std::abs(v));
    return m;
}

/// Drop numerically-zero leading coefficients.
inline std::vector<double> trim(std::vector<double> c) {
    const double cut = kZeroRel * max_abs(c);
    while (c.size() > 1 && std::abs(c.back()) <= cut) c.pop_back();
    if (c.size() == 1 && std::abs(c[0]) <= cut) c[0] = 0.0;
    return c;
}

inline bool is_zero(const std::vector<double>& c) {
    return c.size() == 1 && c[0] == 0.0;
}

inline int degree(const std::vector<double>& c) { return static_cast<int>(c.size()) - 1; }

inline std::vector<double> derivative(const std::vector<double>& c) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
    return trim(std::move(d));
}

inline std::vector<double> normalized(std::vector<double> c) {
    const double m = max_abs(c);
    if (m > 0.0)
        for (double& v : c) v /= m;
    return c;
}

/// Remainder of u mod v (v nonzero, deg v <= deg u handled gracefully).
inline std::vector<double> mod(const std::vector<double>& u, const std::vector<double>& v) {
    std::vector<double> r = u;
    const int dv = degree(v);
    const double lead = v.back();
    while (degree(r) >= dv && !is_zero(trim(r))) {
        const int dr = degree(r);
        if (dr < dv) break;
        const double q = r.back() / lead;
        for (int i = 0; i <= dv; ++i)
            r[static_cast<std::size_t>(dr - dv + i)] -= q * v[static_cast<std::size_t>(i)];
        r.pop_back();
        if (r.empty()) r.push_back(0.0);
    }
    return trim(std::move(r));
}

/// Quotient of an (assumed) exact division u / v.
inline std::vector<double> divide(const std::vector<double>& u, const std::vector<double>& v) {
    const int du = degree(u), dv = degree(v);
    if (du < dv) return {0.0};
    std::vector<double> r = u;
    std::vector<double> q(static_cast<std::size_t>(du - dv + 1), 0.0);
    const double lead = v.back();
    for (int k = du - dv; k >= 0; --k) {
        const double c = r[static_cast<std::size_t>(k + dv)] / lead;
        q[static_cast<std::size_t>(k)] = c;
        for (int i = 0; i <= dv; ++i)
            r[static_cast<std::size_t>(k + i)] -= c * v[static_cast<std::size_t>(i)];
    }
    return trim(std::move(q));
}

/// Euclidean gcd with per-step normalization; result normalized.
inline std::vector<double> gcd(std::vector<double> a, std::vector<double> b) {
    a = normalized(trim(std::move(a)));
    b = normalized(trim(std::move(b)));
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    if (degree(a) < degree(b)) std::swap(a, b);
    while (true) {
        std::vector<double> r = mod(a, b);
        if (is_zero(r) || max_abs(r) <= kZeroRel) return b;
        a = std::move(b);
        b = normalized(std::move(r));
    }
}

/// Square-free part p / gcd(p, p').
inline std::vector<double> square_free_part(const std::vector<double>& p) {
    const std::vector<double> g = gcd(p, derivative(p));
    if (degree(g) == 0) return trim(p);
    return divide(trim(p), g);
}

inline int sign_at_plus_inf(const std::vector<double>& c) { return c.back() > 0.0 ? 1 : -1; }

inline int sign_at_minus_inf(const std::vector<double>& c) {
    const int s = sign_at_plus_inf(c);
    return degree(c) % 2 == 0 ? s : -s;
}

/// Sturm chain of a (square-free) polynomial.
inline std::vector<std::vector<double>> sturm_chain(const std::vector<double>& p) {
    std::vector<std::vector<double>> chain;
    chain.push_back(normalized(trim(p)));
    if (degree(chain[0]) == 0) return chain;
    chain.push_back(normalized(derivative(chain[0])));
    while (degree(chain.back()) > 0) {
        std::vector<double> r = mod(chain[chain.size() - 2], chain.back());
        if (is_zero(r) || max_abs(r) <= kZeroRel) break;
        for (double& v : r) v = -v;
        chain.push_back(normalized(std::move(r)));
    }
    return chain;
}

inline int sign_variations(const std::vector<std::vector<double>>& chain, bool at_plus_inf) {
    int variations = 0;
    int prev = 0;
    for (const auto& p : chain) {
        if (is_zero(p)) continue;
        const int s = at_plus_inf ? sign_at_plus_inf(p) : sign_at_minus_inf(p);
        if (prev != 0 && s != prev) ++variations;
        prev = s;
    }
    return variations;
}

} // namespace poly

/// Number of distinct real roots of a nonzero polynomial: Sturm count on
/// the square-free part.
inline int count_distinct_real_roots(const std::vector<double>& coeffs) {
    const std::vector<double> p = poly::trim(coeffs);
    if (poly::is_zero(p)) throw std::invalid_argument("count_distinct_real_roots: zero polynomial");
    if (poly::degree(p) == 0) return 0;
    const std::vector<double> q = poly::square_free_part(p);
    if (poly::degree(q) == 0) return 0;
    const auto chain = poly::sturm_chain(q);
    return poly::sign_variations(chain, false) - poly::sign_variations(chain, true);
}

/// Whether a degree-d binary form, given by the coefficients of its
/// dehomogenization f(x, 1) ascending in x, has d distinct real projective
/// roots. A degree drop of one adds a simple root at infinity; a drop of
/// two or more makes infinity a multiple root.
inline bool has_d_distinct_real_roots(const std::vector<double>& dehomogenized, int d) {
    if (d < 1) throw std::invalid_argument("has_d_distinct_real_roots: d must be >= 1");
    const std::vector<double> p = poly::trim(dehomogenized);
    if (poly::is_zero(p)) return false;
    const int drop = d - poly::degree(p);
    if (drop < 0 || drop > 1) return false;
    if (poly::degree(p) == 0) return drop == 1 && d == 1;
    return count_distinct_real_roots(p) == poly::degree(p);
}

} // namespace ntr
