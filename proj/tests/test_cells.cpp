#include "ntr/cells.hpp"
#include "ntr/experiments.hpp"
#include "ntr/rank_bounds.hpp"

#include <doctest.h>

using namespace ntr;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double a : v) x[i++] = a;
    return x;
}

Eigen::VectorXd unit(int n, int i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[i] = 1.0;
    return e;
}

} // namespace

TEST_CASE("all-positive factors sit in the trivial cell") {
    Rng rng(3);
    const Decomposition d = random_planted_decomposition(Shape{3, 3, 3}, 2, rng);
    const CellPattern p = support_pattern(d);
    CHECK(p.trivial());
    CHECK_FALSE(p.on_boundary());
    CHECK(p.admissible());
    CHECK_FALSE(p.degenerate);
}

TEST_CASE("the unique 4-term decomposition is nontrivial, admissible, covering") {
    const CellPattern p = support_pattern(rank4_222_decomposition());
    CHECK_FALSE(p.trivial());
    CHECK(p.on_boundary());
    CHECK(p.admissible());
    for (bool covered : support_cover_check(p)) CHECK(covered);
}

TEST_CASE("common zero index breaks admissibility and cover") {
    Decomposition d{Shape{2, 2, 2}, DecompMode::nonnegative, {}};
    for (int i = 0; i < 2; ++i)
        d.terms.push_back({{unit(2, 0), vec({1, 1}), vec({1, 1})}});
    const CellPattern p = support_pattern(d);
    CHECK_FALSE(p.admissible());
    const auto cover = support_cover_check(p);
    CHECK_FALSE(cover[0]);
    CHECK(cover[1]);
    CHECK(cover[2]);
}

TEST_CASE("single positive term covers everything") {
    Decomposition d{Shape{2, 3, 2}, DecompMode::nonnegative,
                    {{{vec({1, 2}), vec({3, 1, 2}), vec({1, 1})}}}};
    for (bool covered : support_cover_check(support_pattern(d))) CHECK(covered);
}

TEST_CASE("zero factor flags the pattern degenerate") {
    Decomposition d{Shape{2, 2, 2}, DecompMode::nonnegative,
                    {{{vec({0, 0}), vec({1, 1}), vec({1, 1})}}}};
    const CellPattern p = support_pattern(d);
    CHECK(p.degenerate);
}

TEST_CASE("distinct_cells_witness") {
    Rng rng(9);
    const Decomposition d = random_planted_decomposition(Shape{3, 3, 3}, 3, rng);

    Decomposition perm = d;
    std::rotate(perm.terms.begin(), perm.terms.begin() + 1, perm.terms.end());
    for (auto& term : perm.terms) {
        term.factors[1] *= 5.0;
        term.factors[2] *= 0.2;
    }
    CHECK_FALSE(distinct_cells_witness(d, perm));
    CHECK_FALSE(distinct_cells_witness(d, d));

    // split one term of a diagonal tensor two different ways: same tensor,
    // different zero patterns
    Decomposition diag{Shape{2, 2, 2}, DecompMode::nonnegative, {}};
    diag.terms.push_back({{unit(2, 0), unit(2, 0), unit(2, 0)}});
    diag.terms.push_back({{unit(2, 1), unit(2, 1), unit(2, 1)}});
    Decomposition split_a = diag;  // split the first term along mode 1
    split_a.terms.push_back(split_a.terms[0]);
    split_a.terms[0].factors[0] *= 0.5;
    split_a.terms[2].factors[0] *= 0.5;
    Decomposition split_b = diag;  // split the second term instead
    split_b.terms.push_back(split_b.terms[1]);
    split_b.terms[1].factors[0] *= 0.25;
    split_b.terms[2].factors[0] *= 0.75;
    CHECK(frobenius_norm(evaluate(split_a) - evaluate(split_b)) == 0.0);
    CHECK(distinct_cells_witness(split_a, split_b));
    CHECK_THROWS_AS(distinct_cells_witness(diag, split_a), std::invalid_argument);
}

TEST_CASE("uni23 screen: r = 2") {
    Rng rng(13);
    const Decomposition d = random_planted_decomposition(Shape{3, 3, 3}, 2, rng);
    CHECK(uni23_cell_screen(Shape{3, 3, 3}, 2, support_pattern(d)) ==
          Uni23Screen::unique_by_theory);
    CHECK_THROWS_AS(uni23_cell_screen(Shape{3, 3, 3}, 4, support_pattern(d)),
                    std::invalid_argument);
    CHECK_THROWS_AS(uni23_cell_screen(Shape{2, 3, 3}, 2, support_pattern(d)),
                    std::invalid_argument);
}

TEST_CASE("uni23 screen: the excluded r = 3 configuration") {
    // u_1 = u_2 = e_1, v_1 = v_3 = e_1, w_2 = w_3 = e_1, all other factors positive
    Decomposition d{Shape{3, 3, 3}, DecompMode::nonnegative, {}};
    d.terms.push_back({{unit(3, 0), unit(3, 0), vec({1, 2, 1})}});
    d.terms.push_back({{unit(3, 0), vec({2, 1, 1}), unit(3, 0)}});
    d.terms.push_back({{vec({1, 1, 2}), unit(3, 0), unit(3, 0)}});
    const CellPattern p = support_pattern(d);
    REQUIRE(p.admissible());
    CHECK(uni23_cell_screen(Shape{3, 3, 3}, 3, p) == Uni23Screen::excluded_cell);

    // also detected after permuting the terms
    Decomposition perm = d;
    std::swap(perm.terms[0], perm.terms[2]);
    CHECK(uni23_cell_screen(Shape{3, 3, 3}, 3, support_pattern(perm)) ==
          Uni23Screen::excluded_cell);

    // the pinned coordinate may be any index, not just the first
    Decomposition shifted{Shape{3, 3, 3}, DecompMode::nonnegative, {}};
    shifted.terms.push_back({{unit(3, 2), unit(3, 1), vec({1, 2, 1})}});
    shifted.terms.push_back({{unit(3, 2), vec({2, 1, 1}), unit(3, 1)}});
    shifted.terms.push_back({{vec({1, 1, 2}), unit(3, 1), unit(3, 1)}});
    CHECK(uni23_cell_screen(Shape{3, 3, 3}, 3, support_pattern(shifted)) ==
          Uni23Screen::excluded_cell);
}

TEST_CASE("uni23 screen: other admissible r = 3 patterns are unique, inadmissible unknown") {
    Rng rng(17);
    const Decomposition trivial3 = random_planted_decomposition(Shape{3, 3, 3}, 3, rng);
    CHECK(uni23_cell_screen(Shape{3, 3, 3}, 3, support_pattern(trivial3)) ==
          Uni23Screen::unique_by_theory);

    Decomposition bad{Shape{3, 3, 3}, DecompMode::nonnegative, {}};
    for (int i = 0; i < 3; ++i)
        bad.terms.push_back({{unit(3, 0), vec({1, 1, 1}), vec({1, 1, 1})}});
    CHECK(uni23_cell_screen(Shape{3, 3, 3}, 3, support_pattern(bad)) == Uni23Screen::unknown);
}

TEST_CASE("pattern flags and multiset view are stable under gauge changes") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const Decomposition d = random_planted_decomposition(Shape{2, 3, 2}, 3, rng);
        CHECK(support_pattern(d).trivial());  // positive iid factors: interior
        Decomposition g = d;
        std::rotate(g.terms.begin(), g.terms.begin() + 1, g.terms.end());
        for (auto& term : g.terms) term.factors[0] *= 10.0;
        CHECK_FALSE(distinct_cells_witness(d, g));
    }
}

TEST_CASE("boundary fraction of random positive decompositions is tiny") {
    Rng rng(25);
    int on_boundary = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        const Decomposition d = random_planted_decomposition(Shape{3, 3, 3}, 3, rng);
        const CellPattern p = support_pattern(d, 1e-7);
        if (p.on_boundary()) ++on_boundary;
        CHECK(p.on_boundary() == !p.trivial());
    }
    CHECK(on_boundary <= trials / 100);
}
