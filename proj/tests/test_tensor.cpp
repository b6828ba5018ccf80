#include "ntr/canonical.hpp"
#include "ntr/decomposition.hpp"
#include "ntr/rank_bounds.hpp"
#include "ntr/tensor.hpp"

#include <doctest.h>

#include <array>
#include <vector>

using namespace ntr;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double a : v) x[i++] = a;
    return x;
}

} // namespace

TEST_CASE("evaluate: empty term list gives the zero tensor") {
    Decomposition d{Shape{2, 2, 2}, DecompMode::nonnegative, {}};
    const Tensor t = evaluate(d);
    CHECK(t.is_zero());
    CHECK(t.nonneg());
}

TEST_CASE("evaluate: the four unit terms give the slice-identity/antidiagonal hypermatrix") {
    const Tensor expected = rank4_222_tensor();
    const Tensor got = evaluate(rank4_222_decomposition());
    CHECK(frobenius_norm(got - expected) == 0.0);
    // hypermatrix display [[1 0 | 0 1], [0 1 | 1 0]]
    CHECK(got.at(std::array{0, 0, 0}) == 1.0);
    CHECK(got.at(std::array{0, 1, 0}) == 0.0);
    CHECK(got.at(std::array{0, 1, 1}) == 1.0);
    CHECK(got.at(std::array{1, 0, 1}) == 1.0);
}

TEST_CASE("evaluate: single term outer product entries") {
    Decomposition d{Shape{2, 2, 2}, DecompMode::nonnegative, {}};
    d.terms.push_back({{vec({2, 0}), vec({0, 3}), vec({1, 1})}});
    const Tensor t = evaluate(d);
    CHECK(t.at(std::array{0, 1, 0}) == doctest::Approx(6.0));
    CHECK(t.at(std::array{0, 1, 1}) == doctest::Approx(6.0));
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) sum += std::abs(t[i]);
    CHECK(sum == doctest::Approx(12.0));
}

TEST_CASE("evaluate: shape mismatch raises") {
    Decomposition d{Shape{2, 2, 2}, DecompMode::nonnegative, {}};
    d.terms.push_back({{vec({1, 0}), vec({1, 0, 0}), vec({1, 0})}});
    CHECK_THROWS_AS(evaluate(d), std::invalid_argument);
}

TEST_CASE("inner product and norm") {
    const Tensor a = rank4_222_tensor();
    CHECK(inner_product(a, a) == doctest::Approx(4.0));
    const Tensor zero = Tensor::zeros(a.shape(), true);
    CHECK(inner_product(a, zero) == 0.0);

    Decomposition d{Shape{2, 3, 2}, DecompMode::real, {}};
    d.terms.push_back({{vec({1, 0}), vec({0, 1, 0}), vec({0, 1})}});
    CHECK(frobenius_norm(evaluate(d)) == doctest::Approx(1.0));

    CHECK_THROWS_AS(inner_product(a, Tensor::zeros(Shape{2, 2}, true)), std::invalid_argument);
}

TEST_CASE("direct_sum: identity blocks and zero padding") {
    const Tensor eye2 = matrix_as_tensor(Eigen::MatrixXd::Identity(2, 2));
    const Tensor eye4 = direct_sum(eye2, eye2);
    CHECK(frobenius_norm(eye4 - matrix_as_tensor(Eigen::MatrixXd::Identity(4, 4))) == 0.0);

    const Tensor a = rank4_222_tensor();
    const Tensor padded = direct_sum(a, Tensor::zeros(Shape{1, 1, 1}, true));
    CHECK(padded.shape() == Shape({3, 3, 3}));
    // leading block equals a, everything else zero
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                const double v = padded.at(std::array{i, j, k});
                if (i < 2 && j < 2 && k < 2)
                    CHECK(v == a.at(std::array{i, j, k}));
                else
                    CHECK(v == 0.0);
            }

    CHECK_THROWS_AS(direct_sum(a, eye2), std::invalid_argument);
}

TEST_CASE("absorb_vector: appended mode multiplies entries") {
    Decomposition d{Shape{2, 2}, DecompMode::nonnegative, {}};
    d.terms.push_back({{vec({1, 2}), vec({3, 1})}});
    const Tensor a = evaluate(d);
    const Tensor b = absorb_vector(a, vec({1, 1}));
    CHECK(b.order() == 3);
    CHECK(b.at(std::array{1, 0, 0}) == doctest::Approx(6.0));
    CHECK(b.at(std::array{1, 0, 1}) == doctest::Approx(6.0));

    const Tensor eye2 = matrix_as_tensor(Eigen::MatrixXd::Identity(2, 2));
    const Tensor unit = absorb_vector(eye2, vec({1}));
    CHECK(unit.shape() == Shape({2, 2, 1}));
    CHECK(unit.data() == eye2.data());

    CHECK_THROWS_AS(absorb_vector(a, vec({0, 0})), std::invalid_argument);
    CHECK_THROWS_AS(absorb_vector(a, vec({-1, 1})), std::invalid_argument);
}

TEST_CASE("mode_slices: identity and antidiagonal slices of the 2x2x2 example") {
    const Tensor a = rank4_222_tensor();
    const auto slices = mode_slices(a, 2);
    REQUIRE(slices.size() == 2);
    CHECK(frobenius_norm(slices[0] - matrix_as_tensor(Eigen::MatrixXd::Identity(2, 2))) == 0.0);
    Eigen::MatrixXd anti(2, 2);
    anti << 0, 1, 1, 0;
    CHECK(frobenius_norm(slices[1] - matrix_as_tensor(anti)) == 0.0);
    CHECK_THROWS_AS(mode_slices(a, 3), std::invalid_argument);
}

TEST_CASE("flatten of a rank-one term is a rank-one matrix") {
    Decomposition d{Shape{3, 2, 4}, DecompMode::real, {}};
    d.terms.push_back({{vec({1, -2, 0.5}), vec({2, 3}), vec({1, 0, 2, -1})}});
    const Tensor t = evaluate(d);
    for (int mode = 0; mode < 3; ++mode) CHECK(numerical_rank(flatten(t, mode)) == 1);
}

TEST_CASE("slices of a direct sum have disjoint supports") {
    const Tensor a = rank4_222_tensor();
    const Tensor s = direct_sum(a, a);
    for (int mode = 0; mode < 3; ++mode) {
        const auto slices = mode_slices(s, mode);
        // block structure: first two slices live in the leading block only
        for (int t = 0; t < 2; ++t)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const double v = slices[static_cast<std::size_t>(t)].at(std::array{i, j});
                    if (i >= 2 || j >= 2) CHECK(v == 0.0);
                }
        for (int t = 2; t < 4; ++t)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const double v = slices[static_cast<std::size_t>(t)].at(std::array{i, j});
                    if (i < 2 || j < 2) CHECK(v == 0.0);
                }
    }
}

TEST_CASE("flatten/unflatten round trip") {
    const Tensor a = latin_square_tensor(3);
    for (int mode = 0; mode < 3; ++mode) {
        const Tensor back = unflatten_mode(flatten(a, mode), a.shape(), mode, true);
        CHECK(frobenius_norm(back - a) == 0.0);
    }
}
