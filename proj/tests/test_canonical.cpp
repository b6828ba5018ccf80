#include "ntr/canonical.hpp"
#include "ntr/random.hpp"
#include "ntr/rank_bounds.hpp"

#include <doctest.h>

#include <algorithm>
#include <vector>

using namespace ntr;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double a : v) x[i++] = a;
    return x;
}

Decomposition random_decomp(const Shape& shape, int r, DecompMode mode, Rng& rng) {
    Decomposition d{shape, mode, {}};
    for (int i = 0; i < r; ++i) {
        RankOneTerm term;
        for (int k = 0; k < shape.order(); ++k) {
            Eigen::VectorXd f(shape.dim(k));
            for (Eigen::Index j = 0; j < f.size(); ++j)
                f[j] = mode == DecompMode::nonnegative ? rng.uniform01() + 0.05 : rng.normal();
            term.factors.push_back(std::move(f));
        }
        d.terms.push_back(std::move(term));
    }
    return d;
}

double decomp_distance(const Decomposition& a, const Decomposition& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.terms.size(); ++i)
        for (std::size_t k = 0; k < a.terms[i].factors.size(); ++k)
            s += (a.terms[i].factors[k] - b.terms[i].factors[k]).norm();
    return s;
}

} // namespace

TEST_CASE("canonicalize: permuted copies agree") {
    Rng rng(7);
    Decomposition d = random_decomp(Shape{3, 2, 4}, 4, DecompMode::real, rng);
    Decomposition perm = d;
    std::rotate(perm.terms.begin(), perm.terms.begin() + 1, perm.terms.end());
    CHECK(decomp_distance(canonicalize(d), canonicalize(perm)) == doctest::Approx(0.0));
}

TEST_CASE("canonicalize: scale moved between factors is absorbed") {
    const Eigen::VectorXd u = vec({0.6, 0.8});
    const Eigen::VectorXd v = vec({1.0, 0.0});
    const Eigen::VectorXd w = vec({2.0, 1.0});
    Decomposition d1{Shape{2, 2, 2}, DecompMode::nonnegative, {{{2.0 * u, v, w}}}};
    Decomposition d2{Shape{2, 2, 2}, DecompMode::nonnegative, {{{u, v, 2.0 * w}}}};
    CHECK(decomp_distance(canonicalize(d1), canonicalize(d2)) == doctest::Approx(0.0));
}

TEST_CASE("canonicalize: idempotent and rejects zero terms") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Decomposition d = random_decomp(Shape{2, 3, 2}, 3, DecompMode::real, rng);
        const Decomposition c1 = canonicalize(d);
        const Decomposition c2 = canonicalize(c1);
        CHECK(decomp_distance(c1, c2) == 0.0);
    }
    Decomposition z{Shape{2, 2, 2}, DecompMode::nonnegative,
                    {{{vec({0, 0}), vec({1, 0}), vec({1, 1})}}}};
    CHECK_THROWS_AS(canonicalize(z), std::invalid_argument);
}

TEST_CASE("match: identity and gauge-transformed copies") {
    Rng rng(3);
    const Decomposition d = random_decomp(Shape{3, 3, 3}, 3, DecompMode::nonnegative, rng);
    const MatchResult self = match_decompositions(d, d, 1e-12);
    CHECK(self.matched);
    CHECK(self.max_term_distance == doctest::Approx(0.0));

    Decomposition shuffled = d;
    std::swap(shuffled.terms[0], shuffled.terms[2]);
    for (auto& term : shuffled.terms) {
        term.factors[0] *= 3.0;
        term.factors[1] *= 0.25;
        term.factors[2] *= 4.0 / 3.0;
    }
    const MatchResult m = match_decompositions(d, shuffled, 1e-9);
    CHECK(m.matched);
    CHECK(m.max_term_distance < 1e-10);
}

TEST_CASE("match: the unique 4-term decomposition differs from another candidate") {
    const Decomposition unique = rank4_222_decomposition();
    Rng rng(5);
    const Decomposition other = random_decomp(Shape{2, 2, 2}, 4, DecompMode::nonnegative, rng);
    CHECK_FALSE(match_decompositions(unique, other, 1e-5).matched);

    Decomposition wrong_r{Shape{2, 2, 2}, DecompMode::nonnegative, {}};
    CHECK_THROWS_AS(match_decompositions(unique, wrong_r, 1e-5), std::invalid_argument);
}

TEST_CASE("min_cost_assignment solves a known instance") {
    Eigen::MatrixXd cost(3, 3);
    cost << 4, 1, 3,
            2, 0, 5,
            3, 2, 2;
    const auto a = min_cost_assignment(cost);
    // optimal: (0->1, 1->0, 2->2) with total 1 + 2 + 2 = 5
    CHECK(a[0] == 1);
    CHECK(a[1] == 0);
    CHECK(a[2] == 2);
}
