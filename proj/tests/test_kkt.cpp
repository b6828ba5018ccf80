#include "ntr/experiments.hpp"
#include "ntr/kkt.hpp"
#include "ntr/solvers.hpp"

#include <doctest.h>

using namespace ntr;

TEST_CASE("zero residual gives an all-zero report") {
    Rng rng(12);
    const Decomposition plant = random_planted_decomposition(Shape{3, 3, 3}, 2, rng);
    const Tensor a = evaluate(plant);
    const KktReport rep = kkt_residuals(a, plant);
    CHECK(rep.max_inequality_violation == 0.0);
    CHECK(rep.max_support_equality_residual == 0.0);
    CHECK(rep.tangent_orthogonality == 0.0);
}

TEST_CASE("solver outputs satisfy the first-order conditions") {
    int pass = 0;
    for (int s = 0; s < 20; ++s) {
        Rng rng(stream_seed(5, s));
        const Tensor a = random_uniform_tensor(Shape{3, 3, 3}, rng);
        SolverConfig cfg;
        cfg.restarts = 10;
        cfg.stall_tol = 1e-14;
        cfg.max_outer_iters = 6000;
        cfg.seed = stream_seed(6, s);
        const auto res = nncp_solve(a, 2, cfg);
        const KktReport rep = kkt_residuals(a, res.best);
        if (rep.max_inequality_violation <= 1e-6 &&
            rep.max_support_equality_residual <= 1e-6 && rep.tangent_orthogonality <= 1e-6)
            ++pass;
    }
    CHECK(pass >= 19);
}

TEST_CASE("perturbing an optimum breaks stationarity") {
    Rng rng(42);
    const Tensor a = random_uniform_tensor(Shape{3, 3, 3}, rng);
    SolverConfig cfg;
    cfg.restarts = 10;
    cfg.stall_tol = 1e-14;
    cfg.max_outer_iters = 6000;
    cfg.seed = 9;
    auto res = nncp_solve(a, 2, cfg);
    res.best.terms[0].factors[0][0] += 0.1;
    const KktReport rep = kkt_residuals(a, res.best);
    const double worst = std::max(rep.max_inequality_violation, rep.tangent_orthogonality);
    CHECK(worst > 1e-3);
}

TEST_CASE("mode and shape mismatches raise") {
    const Tensor a = rank4_222_tensor();
    Decomposition real_d{Shape{2, 2, 2}, DecompMode::real, {}};
    CHECK_THROWS_AS(kkt_residuals(a, real_d), std::invalid_argument);
    Decomposition wrong_shape{Shape{2, 2, 3}, DecompMode::nonnegative, {}};
    CHECK_THROWS_AS(kkt_residuals(a, wrong_shape), std::invalid_argument);
}

TEST_CASE("report fields are nonnegative and bounded by the residual scale") {
    Rng rng(77);
    const Tensor a = random_uniform_tensor(Shape{2, 3, 2}, rng);
    SolverConfig cfg;
    cfg.restarts = 4;
    cfg.seed = 10;
    const auto res = nncp_solve(a, 2, cfg);
    const KktReport rep = kkt_residuals(a, res.best);
    CHECK(rep.max_inequality_violation >= 0.0);
    CHECK(rep.max_support_equality_residual >= 0.0);
    // unit probes: every inner product is at most the residual norm
    CHECK(rep.max_inequality_violation <= res.residual + 1e-12);
    CHECK(rep.tangent_orthogonality <= res.residual + 1e-12);
}
