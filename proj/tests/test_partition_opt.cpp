#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>

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

SetFunction nontrivial_domain(int n, std::function<double(std::uint64_t)> f) {
    const std::uint64_t full = Cut::full_mask(n);
    return [=](std::uint64_t mask) -> std::optional<double> {
        if (mask == 0 || mask == full) return std::nullopt;
        return f(mask);
    };
}

}  // namespace

TEST_CASE("g_max on the projector ties everywhere and picks bitmask 1") {
    testsupport::Rng rng(71);
    const Distribution pi = testsupport::random_distribution(rng, 5);
    const CutSearchResult r = brute_force_cut(stationary_projector(pi), 0.5, CutObjective::g_max);
    CHECK(r.best_cut.mask() == 1);
    CHECK(r.objective_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.evaluations == 30);  // 2^5 - 2
}

TEST_CASE("Frobenius minimizer coincides with the g maximizer") {
    testsupport::Rng rng(72);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 6);
        const Kernel p = testsupport::random_reversible_kernel(rng, n);
        const double alpha = 0.25 + 0.25 * static_cast<int>(rng() % 3);
        const CutSearchResult frob = brute_force_cut(p, alpha, CutObjective::frobenius_A);
        const CutSearchResult gmax = brute_force_cut(p, alpha, CutObjective::g_max);
        CHECK(frob.best_cut.mask() == gmax.best_cut.mask());
        CHECK(frob.objective_value ==
              doctest::Approx(detail::frobenius_from_g(gmax.objective_value, alpha,
                                                       trace_of_square(p.matrix)))
                  .epsilon(1e-11));
    }
}

TEST_CASE("g minimizer is the symmetrised Cheeger cut; max distance closed form") {
    testsupport::Rng rng(73);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 6);
        const Kernel p = testsupport::random_reversible_kernel(rng, n);
        const CutSearchResult gmin = brute_force_cut(p, 0.5, CutObjective::g_min);
        const CheegerReport cheeger = cheeger_constants(p);
        CHECK(gmin.best_cut.mask() == cheeger.symmetrised_cut.mask());
        CHECK(gmin.objective_value == doctest::Approx(cheeger.symmetrised).epsilon(1e-12));

        // Maximal Frobenius distance over cuts, via the direct-route oracle.
        for (const double alpha : {0.25, 0.5, 0.75}) {
            double worst = -1.0;
            for (std::uint64_t mask = 1; mask < Cut::full_mask(n); ++mask) {
                worst = std::max(worst, testsupport::direct_cut_objective(p, mask, alpha));
            }
            const double tp2 = trace_of_square(p.matrix);
            const double closed = alpha * alpha * tp2 -
                                  2.0 * alpha * (1.0 - alpha) * cheeger.symmetrised + 1.0 -
                                  2.0 * alpha * alpha;
            CHECK(std::abs(worst - closed) <= 1e-10);
        }
    }
}

TEST_CASE("search results re-evaluate exactly at the reported cut") {
    testsupport::Rng rng(74);
    const Kernel p = testsupport::random_reversible_kernel(rng, 7);
    for (CutObjective kind : {CutObjective::frobenius_A, CutObjective::g_max,
                              CutObjective::g_min, CutObjective::h_max, CutObjective::trace_GP,
                              CutObjective::trace_GPG}) {
        const CutSearchResult r = brute_force_cut(p, 0.4, kind);
        CHECK(std::abs(r.objective_value - evaluate_cut_objective(p, 0.4, kind, r.best_cut)) <=
              1e-12);
        CHECK(r.evaluations == 126);
    }
}

TEST_CASE("degenerate mixture weights are rejected for cut optimization") {
    testsupport::Rng rng(75);
    const Kernel p = testsupport::random_reversible_kernel(rng, 4);
    CHECK_THROWS_AS(brute_force_cut(p, 0.0, CutObjective::frobenius_A), invariant_error);
    CHECK_THROWS_AS(brute_force_cut(p, 1.0, CutObjective::frobenius_A), invariant_error);
    CHECK_THROWS_AS(mm_optimize(p, 0.0, Cut(1, 4)), invariant_error);
}

TEST_CASE("trace objectives match the explicit product route") {
    testsupport::Rng rng(76);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 5);
        const Kernel p = testsupport::random_reversible_kernel(rng, n);
        const Cut s = testsupport::random_cut(rng, n);
        const Kernel g = gibbs_kernel(p.pi, Partition::from_cut(s));
        const Matrix gp = g.matrix * p.matrix;
        const Matrix gpg = gp * g.matrix;

        const double tr_pgp = (p.matrix * g.matrix * p.matrix).trace();
        CHECK(std::abs(evaluate_cut_objective(p, 0.5, CutObjective::trace_GP, s) - tr_pgp) <=
              1e-11);
        const double tr_gpgpg = (gpg * gp).trace();
        CHECK(std::abs(evaluate_cut_objective(p, 0.5, CutObjective::trace_GPG, s) - tr_gpgpg) <=
              1e-11);

        // The traces are the squared Frobenius distances plus one.
        Matrix centered_gp = gp;
        Matrix centered_gpg = gpg;
        for (int x = 0; x < n; ++x) {
            centered_gp.row(x) -= p.pi.probs().transpose();
            centered_gpg.row(x) -= p.pi.probs().transpose();
        }
        CHECK(std::abs(frobenius_norm_sq(centered_gp, p.pi) + 1.0 - tr_pgp) <= 1e-11);
        CHECK(std::abs(frobenius_norm_sq(centered_gpg, p.pi) + 1.0 - tr_gpgpg) <= 1e-11);
    }
}

TEST_CASE("singleton argmax: identity ties to the lowest index; worked example") {
    testsupport::Rng rng(77);
    const Distribution pi = testsupport::random_distribution(rng, 5);
    CHECK(singleton_argmax(validate_kernel(Matrix::Identity(5, 5), pi)).mask() == 1);
    CHECK(singleton_argmax(two_state_example()).mask() == 1);
}

TEST_CASE("singleton argmax lands in the small-mass half on ergodic kernels") {
    testsupport::Rng rng(78);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 9);
        const Kernel p = trial % 2 == 0 ? testsupport::random_reversible_kernel(rng, n)
                                        : testsupport::random_metropolis_kernel(rng, n);
        const Cut u = singleton_argmax(p);
        CHECK(p.pi.mass(u.mask()) <= 0.5 + 1e-12);
        // Maximizes h over all nontrivial cuts.
        const CutSearchResult hmax = brute_force_cut(p, 0.5, CutObjective::h_max);
        CHECK(h_functional(p, u) == doctest::Approx(hmax.objective_value).epsilon(1e-11));
    }
}

TEST_CASE("constrained singleton: worked tie and the uniform-pi case") {
    CHECK(singleton_constrained_argmax(two_state_example()).mask() == 1);

    testsupport::Rng rng(79);
    // Uniform pi: the denominator is constant, so both rules agree.
    const Kernel p = testsupport::random_doubly_stochastic_kernel(rng, 4);
    CHECK(singleton_constrained_argmax(p).mask() == singleton_argmax(p).mask());
}

TEST_CASE("constrained singleton equals brute force restricted to singletons") {
    testsupport::Rng rng(80);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 6);
        const Kernel p = testsupport::random_reversible_kernel(rng, n);
        const Cut best = singleton_constrained_argmax(p);
        double best_direct = 1e300;
        std::uint64_t best_mask = 0;
        for (int x = 0; x < n; ++x) {
            const double v = testsupport::direct_cut_objective(p, std::uint64_t{1} << x, 0.5);
            if (v < best_direct - 1e-13) {
                best_direct = v;
                best_mask = std::uint64_t{1} << x;
            }
        }
        CHECK(best.mask() == best_mask);
    }
}

TEST_CASE("singleton gap certificate on exhaustive small instances") {
    testsupport::Rng rng(81);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 5);
        const Kernel p = testsupport::random_reversible_kernel(rng, n);
        for (double alpha : {0.3, 0.5, 0.7}) {
            const Cut u = singleton_argmax(p);
            double best = 1e300;
            for (std::uint64_t mask = 1; mask < Cut::full_mask(n); ++mask) {
                best = std::min(best, testsupport::direct_cut_objective(p, mask, alpha));
            }
            const double gap = testsupport::direct_cut_objective(p, u.mask(), alpha) - best;
            CHECK(gap >= -1e-12);
            CHECK(gap <= 2.0 * alpha * (1.0 - alpha) + 1e-12);
        }
    }
}

TEST_CASE("check_submodular: cardinality is modular") {
    const SetFunction card = [](std::uint64_t mask) -> std::optional<double> {
        return static_cast<double>(std::popcount(mask));
    };
    for (int n : {3, 5, 8}) {
        CHECK(check_submodular(card, n).verdict == ModularityVerdict::modular);
    }
}

TEST_CASE("check_submodular: the decomposition terms are supermodular") {
    testsupport::Rng rng(82);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 5);
        const Kernel p = testsupport::random_reversible_kernel(rng, n);
        const auto& pi = p.pi;

        const SetFunction balance = nontrivial_domain(n, [&](std::uint64_t mask) {
            const double m = pi.mass(mask);
            return 1.0 / (m * (1.0 - m)) - 2.0;
        });
        CHECK(check_submodular(balance, n).verdict == ModularityVerdict::supermodular);

        const SetFunction outer = nontrivial_domain(n, [&](std::uint64_t mask) {
            const CutFlowStats st = compute_cut_stats(pi, p.matrix, mask);
            return st.self_out / pi.mass(mask);
        });
        CHECK(check_submodular(outer, n).verdict == ModularityVerdict::supermodular);

        const SetFunction inner = nontrivial_domain(n, [&](std::uint64_t mask) {
            const CutFlowStats st = compute_cut_stats(pi, p.matrix, mask);
            return st.self_in / (1.0 - pi.mass(mask));
        });
        CHECK(check_submodular(inner, n).verdict == ModularityVerdict::supermodular);
    }
}

TEST_CASE("check_submodular: witnesses for a function that is neither") {
    std::map<std::uint64_t, double> table{{0, 0}, {1, 5}, {2, 5}, {3, 0},
                                          {4, 5}, {5, 0}, {6, 0}, {7, 5}};
    const SetFunction f = [&](std::uint64_t mask) -> std::optional<double> {
        return table.at(mask);
    };
    const SubmodularityReport r = check_submodular(f, 3);
    CHECK(r.verdict == ModularityVerdict::neither);
    REQUIRE(r.against_submodular.has_value());
    REQUIRE(r.against_supermodular.has_value());
    const auto [a, b] = *r.against_submodular;
    CHECK(table.at(a & b) + table.at(a | b) > table.at(a) + table.at(b));
    const auto [c, d] = *r.against_supermodular;
    CHECK(table.at(c & d) + table.at(c | d) < table.at(c) + table.at(d));
}

TEST_CASE("decomposition total equals the direct objective") {
    // Worked 2-state value.
    CHECK(decomposition_terms(two_state_example(), Cut(1, 2), 0.5).total ==
          doctest::Approx(25.0 / 64.0).epsilon(1e-13));

    testsupport::Rng rng(83);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 5);
        const Kernel p = testsupport::random_reversible_kernel(rng, n);
        for (double alpha : {0.25, 0.5, 0.75}) {
            for (std::uint64_t mask = 1; mask < Cut::full_mask(n); ++mask) {
                const DecompositionTerms t = decomposition_terms(p, Cut(mask, n), alpha);
                CHECK(std::abs(t.total - testsupport::direct_cut_objective(p, mask, alpha)) <=
                      1e-10);
            }
        }
        // alpha = 0: the Gibbs kernel alone, distance k - 1 = 1.
        CHECK(decomposition_terms(p, Cut(1, n), 0.0).total ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("majorizer touches at the anchor and dominates everywhere") {
    testsupport::Rng rng(84);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 5);
        const Kernel p = testsupport::random_reversible_kernel(rng, n);
        const double alpha = 0.6;
        for (int rep = 0; rep < 4; ++rep) {
            const Cut s0 = testsupport::random_cut(rng, n);
            const double obj0 = decomposition_terms(p, s0, alpha).total;
            CHECK(majorizer_zeta(p, s0, s0, alpha) == doctest::Approx(obj0).epsilon(1e-11));
            for (std::uint64_t mask = 1; mask < Cut::full_mask(n); ++mask) {
                const Cut s(mask, n);
                const double zeta = majorizer_zeta(p, s, s0, alpha);
                const double obj = decomposition_terms(p, s, alpha).total;
                CHECK(zeta >= obj - 1e-10);
            }
        }
    }
}

TEST_CASE("majorizer with a balanced anchor has the slope-free excess") {
    // pi uniform on 4 states, S0 of mass exactly 1/2: tangent slope is 0 and
    // zeta(S;S0) - objective = 2 a (1-a) (1/(pi(S)pi(S')) - 4).
    testsupport::Rng rng(85);
    const Kernel p = testsupport::random_doubly_stochastic_kernel(rng, 4);
    const Cut s0(3, 4);  // mass 1/2
    const double alpha = 0.4;
    for (std::uint64_t mask = 1; mask < 15; ++mask) {
        const Cut s(mask, 4);
        const double m = p.pi.mass(mask);
        const double expected = 2.0 * alpha * (1.0 - alpha) * (1.0 / (m * (1.0 - m)) - 4.0);
        const double excess =
            majorizer_zeta(p, s, s0, alpha) - decomposition_terms(p, s, alpha).total;
        CHECK(excess == doctest::Approx(expected).epsilon(1e-9));
        CHECK(excess >= -1e-12);
    }
}

TEST_CASE("MM: a fixed point yields a single converged iterate") {
    testsupport::Rng rng(86);
    const Kernel p = testsupport::random_reversible_kernel(rng, 6);
    const MMTrace warmup = mm_optimize(p, 0.5, testsupport::random_cut(rng, 6));
    REQUIRE(warmup.converged);
    const Cut fixed = warmup.iterates.back().cut;
    const MMTrace at_fixed = mm_optimize(p, 0.5, fixed);
    CHECK(at_fixed.converged);
    CHECK(at_fixed.iterates.size() == 1);
    CHECK(at_fixed.iterates[0].cut == fixed);
}

TEST_CASE("MM traces are monotone, majorized, and land near the optimum") {
    testsupport::Rng rng(87);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 6);
        const Kernel p = testsupport::random_reversible_kernel(rng, n);
        const double alpha = 0.3 + 0.2 * static_cast<int>(rng() % 3);
        const CutSearchResult best = brute_force_cut(p, alpha, CutObjective::frobenius_A);
        for (int start = 0; start < 3; ++start) {
            const MMTrace trace = mm_optimize(p, alpha, testsupport::random_cut(rng, n));
            CHECK(trace.converged);
            for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
                CHECK(trace.iterates[i].majorizer_value >=
                      trace.iterates[i].true_objective - 1e-10);
                if (i > 0) {
                    CHECK(trace.iterates[i].true_objective <=
                          trace.iterates[i - 1].true_objective + 1e-12);
                }
            }
            CHECK(trace.iterates.back().true_objective >= best.objective_value - 1e-12);
        }
    }
}

TEST_CASE("mm trace csv layout") {
    testsupport::Rng rng(88);
    const Kernel p = testsupport::random_reversible_kernel(rng, 5);
    const MMTrace trace = mm_optimize(p, 0.5, Cut(1, 5));
    std::ostringstream out;
    write_mm_trace_csv(out, trace);
    CHECK(out.str().rfind("iteration,bitmask,objective,majorizer\n0,1,", 0) == 0);
}
