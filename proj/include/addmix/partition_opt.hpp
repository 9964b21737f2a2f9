#pragma once
// Optimization over two-block cuts: exhaustive search for the Frobenius,
// Cheeger-type and trace objectives, singleton approximations with their
// additive gap certificate, exhaustive sub/supermodularity testing, the
// difference-of-supermodular decomposition and its tangent majorizer, and
// the majorize-minimize loop built on it.

#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "addmix/frobenius.hpp"
#include "addmix/sweep.hpp"

namespace addmix {

enum class CutObjective { frobenius_A, trace_GP, trace_GPG, g_max, g_min, h_max };

inline const char* to_string(CutObjective kind) {
    switch (kind) {
        case CutObjective::frobenius_A: return "frobenius_A";
        case CutObjective::trace_GP: return "trace_GP";
        case CutObjective::trace_GPG: return "trace_GPG";
        case CutObjective::g_max: return "g_max";
        case CutObjective::g_min: return "g_min";
        case CutObjective::h_max: return "h_max";
    }
    return "?";
}

namespace detail {

// || A_alpha(S) - Pi ||^2 as a function of g(S):
// alpha^2 Tr(P^2) - 2 alpha (1-alpha) g(S) + 1 - 2 alpha^2.
inline double frobenius_from_g(double g, double alpha, double trace_p2) {
    return alpha * alpha * trace_p2 - 2.0 * alpha * (1.0 - alpha) * g + 1.0 -
           2.0 * alpha * alpha;
}

// Tr(Gibbs(S) M) from the flow statistics of M: w(S)/pi(S) + w(S')/pi(S').
inline double trace_gibbs_times(const CutFlowStats& s, double mass) {
    return s.self_in / mass + s.self_out / (1.0 - mass);
}

// Tr(Pbar^2) of the two-block projection chain from the flow statistics:
// diagonal squares plus twice the product of the off-diagonal entries.
inline double trace_pbar_sq(const CutFlowStats& s, double mass) {
    const double d1 = s.self_in / mass;
    const double d2 = s.self_out / (1.0 - mass);
    return d1 * d1 + d2 * d2 + 2.0 * (s.flow_out / mass) * (s.flow_in / (1.0 - mass));
}

inline void require_optimizable_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw invariant_error(
            "cut optimization needs alpha in (0,1): at alpha = 0 the objective does not "
            "depend on the cut, and at alpha = 1 the Gibbs kernel plays no role");
    }
}

}  // namespace detail

/// Fresh evaluation of a cut-search objective at one cut, O(n^2)-O(n^3).
inline double evaluate_cut_objective(const Kernel& P, double alpha, CutObjective kind,
                                     const Cut& S) {
    switch (kind) {
        case CutObjective::frobenius_A:
            detail::require_optimizable_alpha(alpha);
            return detail::frobenius_from_g(g_functional(P, S), alpha,
                                            trace_of_square(P.matrix));
        case CutObjective::g_max:
        case CutObjective::g_min:
            return g_functional(P, S);
        case CutObjective::h_max:
            return h_functional(P, S);
        case CutObjective::trace_GP: {
            const Matrix p2 = P.matrix * P.matrix;
            const CutFlowStats s = compute_cut_stats(P.pi, p2, S.mask());
            return detail::trace_gibbs_times(s, P.pi.mass(S.mask()));
        }
        case CutObjective::trace_GPG: {
            const CutFlowStats s = compute_cut_stats(P.pi, P.matrix, S.mask());
            return detail::trace_pbar_sq(s, P.pi.mass(S.mask()));
        }
    }
    throw invariant_error("unknown cut objective");
}

struct CutSearchResult {
    Cut best_cut;
    double objective_value;
    CutObjective objective_kind;
    std::uint64_t evaluations;
};

/// Exact optimum of the chosen objective over all 2^n - 2 nontrivial cuts.
/// frobenius_A, trace_GP and trace_GPG are minimized; g_max/h_max maximized;
/// g_min minimized. Ties resolve to the smallest bitmask.
inline CutSearchResult brute_force_cut(const Kernel& P, double alpha, CutObjective kind) {
    const int n = P.n();
    const bool needs_reversible = kind == CutObjective::frobenius_A ||
                                  kind == CutObjective::trace_GP ||
                                  kind == CutObjective::trace_GPG;
    if (needs_reversible && !P.reversible) {
        throw invariant_error("Frobenius-derived cut objectives require a reversible kernel");
    }
    if (kind == CutObjective::frobenius_A) detail::require_optimizable_alpha(alpha);

    const bool maximize = kind == CutObjective::g_max || kind == CutObjective::h_max;
    Matrix p2;
    std::vector<const Matrix*> mats{&P.matrix};
    if (kind == CutObjective::trace_GP) {
        p2 = P.matrix * P.matrix;
        mats = {&p2};
    }
    const double trace_p2 = kind == CutObjective::frobenius_A ? trace_of_square(P.matrix) : 0.0;

    CutMinimizer best;
    std::uint64_t evaluations = 0;
    sweep_nontrivial_cuts(
        P.pi, mats, [&](std::uint64_t mask, double mass, const std::vector<CutFlowStats>& st) {
            ++evaluations;
            double v = 0.0;
            switch (kind) {
                case CutObjective::frobenius_A:
                    v = detail::frobenius_from_g(st[0].flow_out / (mass * (1.0 - mass)), alpha,
                                                 trace_p2);
                    break;
                case CutObjective::g_max:
                case CutObjective::g_min:
                    v = st[0].flow_out / (mass * (1.0 - mass));
                    break;
                case CutObjective::h_max:
                    v = st[0].flow_out / mass;
                    break;
                case CutObjective::trace_GP:
                    v = detail::trace_gibbs_times(st[0], mass);
                    break;
                case CutObjective::trace_GPG:
                    v = detail::trace_pbar_sq(st[0], mass);
                    break;
            }
            best.offer(mask, maximize ? -v : v);
        });
    const Cut cut(best.mask(), n);
    return CutSearchResult{cut, evaluate_cut_objective(P, alpha, kind, cut), kind, evaluations};
}

/// Singleton maximizer of h: the state with the largest escape probability
/// 1 - P(x,x). Ties go to the lowest index.
inline Cut singleton_argmax(const Kernel& P) {
    const int n = P.n();
    if (n < 2) throw invariant_error("singleton search needs n >= 2");
    int best = 0;
    for (int x = 1; x < n; ++x) {
        if (1.0 - P.matrix(x, x) > 1.0 - P.matrix(best, best)) best = x;
    }
    return Cut(std::uint64_t{1} << best, n);
}

/// The exact Frobenius-optimal cut among singletons: maximize
/// (1 - P(x,x)) / (1 - pi(x)). Ties go to the lowest index.
inline Cut singleton_constrained_argmax(const Kernel& P) {
    const int n = P.n();
    if (n < 2) throw invariant_error("singleton search needs n >= 2");
    int best = 0;
    double best_ratio = (1.0 - P.matrix(0, 0)) / (1.0 - P.pi(0));
    for (int x = 1; x < n; ++x) {
        const double r = (1.0 - P.matrix(x, x)) / (1.0 - P.pi(x));
        if (r > best_ratio) {
            best_ratio = r;
            best = x;
        }
    }
    return Cut(std::uint64_t{1} << best, n);
}

enum class ModularityVerdict { submodular, supermodular, modular, neither };

inline const char* to_string(ModularityVerdict v) {
    switch (v) {
        case ModularityVerdict::submodular: return "submodular";
        case ModularityVerdict::supermodular: return "supermodular";
        case ModularityVerdict::modular: return "modular";
        case ModularityVerdict::neither: return "neither";
    }
    return "?";
}

/// Black-box set function over bitmasks; nullopt marks masks outside the
/// function's domain (e.g. the trivial sets for the cut functionals).
using SetFunction = std::function<std::optional<double>(std::uint64_t)>;

struct SubmodularityReport {
    ModularityVerdict verdict;
    // First pair (A, B) violating the respective inequality, if any.
    std::optional<std::pair<std::uint64_t, std::uint64_t>> against_submodular;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> against_supermodular;
};

/// Exhaustive test of f(A&B) + f(A|B) vs f(A) + f(B) over all subset pairs
/// with every operand inside the function's domain. n <= 8.
inline SubmodularityReport check_submodular(const SetFunction& f, int n,
                                            double tol = 1e-9) {
    if (n < 1) throw invariant_error("set function test needs n >= 1");
    if (n > 8) {
        throw infeasible_error("exhaustive pair test over n = " + std::to_string(n) +
                               " exceeds 8");
    }
    const std::uint64_t total = std::uint64_t{1} << n;
    std::vector<std::optional<double>> values(total);
    for (std::uint64_t mask = 0; mask < total; ++mask) values[mask] = f(mask);

    SubmodularityReport report{ModularityVerdict::modular, std::nullopt, std::nullopt};
    bool sub_ok = true, super_ok = true;
    for (std::uint64_t a = 0; a < total; ++a) {
        if (!values[a]) continue;
        for (std::uint64_t b = 0; b < total; ++b) {
            if (!values[b] || !values[a & b] || !values[a | b]) continue;
            const double lhs = *values[a & b] + *values[a | b];
            const double rhs = *values[a] + *values[b];
            if (lhs > rhs + tol && sub_ok) {
                sub_ok = false;
                report.against_submodular = {a, b};
            }
            if (lhs < rhs - tol && super_ok) {
                super_ok = false;
                report.against_supermodular = {a, b};
            }
            if (!sub_ok && !super_ok) break;
        }
        if (!sub_ok && !super_ok) break;
    }
    if (sub_ok && super_ok) report.verdict = ModularityVerdict::modular;
    else if (sub_ok) report.verdict = ModularityVerdict::submodular;
    else if (super_ok) report.verdict = ModularityVerdict::supermodular;
    else report.verdict = ModularityVerdict::neither;
    return report;
}

/// The difference-of-supermodular split of || A_alpha(S) - Pi ||^2:
///   supermodular_part = 2a(1-a) [ (1/pi(S)) sum_{x,y in S'} pi(x)P(x,y)
///                               + (1/pi(S')) sum_{x,y in S} pi(x)P(x,y) ]
///   concave_part      = 2a(1-a)/(pi(S)pi(S')) + 6a^2 - 4a - 1 - a^2 Tr(P^2)
/// and total = supermodular_part - concave_part equals the true objective.
struct DecompositionTerms {
    double supermodular_part;
    double concave_part;
    double total;
};

inline DecompositionTerms decomposition_terms(const Kernel& P, const Cut& S, double alpha) {
    if (!P.reversible) {
        throw invariant_error("decomposition requires a reversible kernel");
    }
    const CutFlowStats st = compute_cut_stats(P.pi, P.matrix, S.mask());
    const double mass = P.pi.mass(S.mask());
    const double a = alpha;
    const double super =
        2.0 * a * (1.0 - a) * (st.self_out / mass + st.self_in / (1.0 - mass));
    const double concave = 2.0 * a * (1.0 - a) / (mass * (1.0 - mass)) + 6.0 * a * a -
                           4.0 * a - 1.0 - a * a * trace_of_square(P.matrix);
    return DecompositionTerms{super, concave, super - concave};
}

/// Majorizer zeta(S; S0): the convex term 1/(pi(S)pi(S')) in the subtracted
/// part is replaced by its tangent at pi(S0), so zeta dominates the true
/// objective everywhere and touches it at S0.
inline double majorizer_zeta(const Kernel& P, const Cut& S, const Cut& S0, double alpha) {
    const CutFlowStats st = compute_cut_stats(P.pi, P.matrix, S.mask());
    const double mass = P.pi.mass(S.mask());
    const double m0 = P.pi.mass(S0.mask());
    const double tangent = 1.0 / (m0 * (1.0 - m0)) +
                           (2.0 * m0 - 1.0) / (m0 * m0 * (1.0 - m0) * (1.0 - m0)) * (mass - m0);
    const double a = alpha;
    const double super =
        2.0 * a * (1.0 - a) * (st.self_out / mass + st.self_in / (1.0 - mass));
    const double linearized = 2.0 * a * (1.0 - a) * tangent + 6.0 * a * a - 4.0 * a - 1.0 -
                              a * a * trace_of_square(P.matrix);
    return super - linearized;
}

struct MMIterate {
    Cut cut;
    double majorizer_value;
    double true_objective;
};

struct MMTrace {
    std::vector<MMIterate> iterates;
    bool converged;
};

namespace detail {

// argmin_S zeta(S; S0), exhaustive for n <= 20 (ties: smallest bitmask),
// single-bit-flip descent from S0 above that.
inline std::uint64_t minimize_majorizer(const Kernel& P, const Cut& S0, double alpha,
                                        double trace_p2) {
    const int n = P.n();
    const double m0 = P.pi.mass(S0.mask());
    const double tangent_base = 1.0 / (m0 * (1.0 - m0));
    const double tangent_slope = (2.0 * m0 - 1.0) / (m0 * m0 * (1.0 - m0) * (1.0 - m0));
    const double a = alpha;
    const auto zeta = [&](double mass, const CutFlowStats& st) {
        const double super =
            2.0 * a * (1.0 - a) * (st.self_out / mass + st.self_in / (1.0 - mass));
        const double linearized =
            2.0 * a * (1.0 - a) * (tangent_base + tangent_slope * (mass - m0)) +
            6.0 * a * a - 4.0 * a - 1.0 - a * a * trace_p2;
        return super - linearized;
    };

    if (n <= 20) {
        CutMinimizer best;
        sweep_nontrivial_cuts(P.pi, {&P.matrix},
                              [&](std::uint64_t mask, double mass,
                                  const std::vector<CutFlowStats>& st) {
                                  best.offer(mask, zeta(mass, st[0]));
                              });
        return best.mask();
    }

    // Deterministic local descent: take the best improving single-bit flip
    // until none improves.
    const std::uint64_t full = Cut::full_mask(n);
    std::uint64_t current = S0.mask();
    double current_value =
        zeta(P.pi.mass(current), compute_cut_stats(P.pi, P.matrix, current));
    for (;;) {
        CutMinimizer best;
        best.offer(current, current_value);
        for (int t = 0; t < n; ++t) {
            const std::uint64_t flipped = current ^ (std::uint64_t{1} << t);
            if (flipped == 0 || flipped == full) continue;
            best.offer(flipped, zeta(P.pi.mass(flipped),
                                     compute_cut_stats(P.pi, P.matrix, flipped)));
        }
        if (best.mask() == current) return current;
        current = best.mask();
        current_value = best.value();
    }
}

}  // namespace detail

/// Majorize-minimize loop from S0: each step exactly minimizes the tangent
/// majorizer, so the true objective is non-increasing along the iterates.
/// Stops at a fixed point of the cut or after max_iters steps.
inline MMTrace mm_optimize(const Kernel& P, double alpha, const Cut& S0, int max_iters = 50) {
    detail::require_optimizable_alpha(alpha);
    if (!P.reversible) {
        throw invariant_error("MM optimization requires a reversible kernel");
    }
    if (S0.n() != P.n()) throw invariant_error("start cut does not match kernel size");
    const double trace_p2 = trace_of_square(P.matrix);
    const auto objective = [&](const Cut& S) {
        return detail::frobenius_from_g(g_functional(P, S), alpha, trace_p2);
    };

    MMTrace trace{{MMIterate{S0, majorizer_zeta(P, S0, S0, alpha), objective(S0)}}, false};
    Cut current = S0;
    for (int l = 0; l < max_iters; ++l) {
        const Cut next(detail::minimize_majorizer(P, current, alpha, trace_p2), P.n());
        if (next == current) {
            trace.converged = true;
            break;
        }
        trace.iterates.push_back(
            MMIterate{next, majorizer_zeta(P, next, current, alpha), objective(next)});
        current = next;
    }
    return trace;
}

inline void write_cut_search_csv_header(std::ostream& out) {
    out << "objective,cut_bitmask,value,evaluations\n";
}

inline void write_cut_search_csv_row(std::ostream& out, const CutSearchResult& r) {
    out << to_string(r.objective_kind) << "," << r.best_cut.mask() << ","
        << std::setprecision(17) << r.objective_value << "," << r.evaluations << "\n";
}

inline void write_mm_trace_csv(std::ostream& out, const MMTrace& trace) {
    out << "iteration,bitmask,objective,majorizer\n" << std::setprecision(17);
    for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
        const MMIterate& it = trace.iterates[i];
        out << i << "," << it.cut.mask() << "," << it.true_objective << ","
            << it.majorizer_value << "\n";
    }
}

}  // namespace addmix
