#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_support.hpp"

using namespace addmix;

namespace {

Kernel two_state_example() {
    Matrix m(2, 2);
    m << 0.5, 0.5, 0.25, 0.75;
    Vector pi(2);
    pi << 1.0 / 3.0, 2.0 / 3.0;
    return validate_kernel(m, Distribution(pi));
}

}  // namespace

TEST_CASE("lifted kernel structure at alpha = 1/2") {
    const Kernel p = two_state_example();
    const Kernel g = gibbs_kernel(p.pi, Partition::singletons(2));
    const LiftedKernel q = lifted_kernel(p, g, 0.5);
    const int n = 2;
    // Both sigma-slices carry total weight 1/2 from every row.
    for (int row = 0; row < 2 * n; ++row) {
        double plus = 0.0, minus = 0.0;
        for (int y = 0; y < n; ++y) {
            plus += q.matrix(row, y);
            minus += q.matrix(row, y + n);
        }
        CHECK(plus == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(minus == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("pi_tilde is stationary for the lifted kernel across the alpha grid") {
    testsupport::Rng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 6);
        const Kernel p = testsupport::random_reversible_kernel(rng, n);
        const int k = 1 + static_cast<int>(rng() % n);
        const Kernel g = gibbs_kernel(p.pi, testsupport::random_partition(rng, n, k));
        for (int i = 0; i <= 10; ++i) {
            const double alpha = i / 10.0;
            const LiftedKernel q = lifted_kernel(p, g, alpha);
            const Vector residual = q.matrix.transpose() * q.pi_tilde - q.pi_tilde;
            CHECK(residual.cwiseAbs().maxCoeff() < 1e-10);
            // Rows sum to one and do not depend on the auxiliary coordinate.
            for (int x = 0; x < n; ++x) {
                CHECK(q.matrix.row(x).sum() == doctest::Approx(1.0).epsilon(1e-12));
                CHECK((q.matrix.row(x) - q.matrix.row(x + n)).cwiseAbs().maxCoeff() == 0.0);
            }
        }
    }
}

TEST_CASE("degenerate weights zero out one sigma block") {
    const Kernel p = two_state_example();
    const Kernel g = gibbs_kernel(p.pi, Partition::singletons(2));
    const LiftedKernel q0 = lifted_kernel(p, g, 0.0);
    CHECK(q0.matrix.rightCols(2).cwiseAbs().maxCoeff() == 0.0);
    const LiftedKernel q1 = lifted_kernel(p, g, 1.0);
    CHECK(q1.matrix.leftCols(2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("marginal of the lift reproduces the additive mixture") {
    const Kernel p = two_state_example();
    const Kernel g = gibbs_kernel(p.pi, Partition::singletons(2));

    const Kernel half = marginal_first_coordinate(lifted_kernel(p, g, 0.5));
    Matrix lazified(2, 2);
    lazified << 0.75, 0.25, 0.125, 0.875;
    CHECK((half.matrix - lazified).cwiseAbs().maxCoeff() < 1e-15);

    CHECK((marginal_first_coordinate(lifted_kernel(p, g, 1.0)).matrix - p.matrix)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((marginal_first_coordinate(lifted_kernel(p, g, 0.0)).matrix - g.matrix)
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("marginal equals the mixture entrywise over the alpha grid") {
    testsupport::Rng rng(22);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 6);
        const Kernel p = testsupport::random_metropolis_kernel(rng, n);
        const int k = 1 + static_cast<int>(rng() % n);
        const Kernel g = gibbs_kernel(p.pi, testsupport::random_partition(rng, n, k));
        for (int i = 0; i <= 10; ++i) {
            const double alpha = i / 10.0;
            const Kernel marginal = marginal_first_coordinate(lifted_kernel(p, g, alpha));
            const Kernel mixture = additive_mixture(p, g, alpha);
            CHECK((marginal.matrix - mixture.matrix).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
}

TEST_CASE("marginal rejects lifts whose rows depend on the auxiliary coordinate") {
    const Kernel p = two_state_example();
    const Kernel g = gibbs_kernel(p.pi, Partition::singletons(2));
    LiftedKernel q = lifted_kernel(p, g, 0.5);
    q.matrix(0, 0) += 2e-12;
    q.matrix(0, 2) -= 2e-12;  // keep the row stochastic
    CHECK_THROWS_AS(marginal_first_coordinate(q), invariant_error);
}

TEST_CASE("lifted kernel rejects out-of-range alpha") {
    const Kernel p = two_state_example();
    const Kernel g = gibbs_kernel(p.pi, Partition::singletons(2));
    CHECK_THROWS_AS(lifted_kernel(p, g, -0.01), invariant_error);
    CHECK_THROWS_AS(lifted_kernel(p, g, 1.01), invariant_error);
}
