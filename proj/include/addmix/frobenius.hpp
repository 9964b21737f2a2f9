#pragma once
// The pi-weighted Frobenius objective: direct distance to the stationary
// projector, the trace identities through the projection chain, the g/h cut
// functionals, the optimal mixture weight on zero-trace partitions, and the
// spectral decay bounds.

#include <cmath>
#include <iomanip>
#include <ostream>
#include <vector>

#include "addmix/kernel.hpp"
#include "addmix/spectral.hpp"

namespace addmix {

/// ||M||^2_{F,pi} = Tr(M* M) with the pi-weighted adjoint
/// M*(x,y) = pi(y) M(y,x) / pi(x); valid for any square M.
inline double frobenius_norm_sq(const Matrix& m, const Distribution& pi) {
    const int n = pi.size();
    double total = 0.0;
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            total += pi(x) / pi(y) * m(x, y) * m(x, y);
        }
    }
    return total;
}

/// Squared Frobenius distance of a stationary kernel from Pi. For reversible
/// K this equals Tr(K^2) - 1; the adjoint-weighted sum is used so the value
/// is also meaningful for non-reversible kernels (GP, GPG).
inline double frobenius_distance_direct(const Kernel& K) {
    Matrix diff = K.matrix;
    for (int x = 0; x < K.n(); ++x) diff.row(x) -= K.pi.probs().transpose();
    return frobenius_norm_sq(diff, K.pi);
}

/// Tr(M^2) as sum_{x,y} M(x,y) M(y,x), without forming the product.
inline double trace_of_square(const Matrix& m) {
    double total = 0.0;
    for (Eigen::Index x = 0; x < m.rows(); ++x) {
        for (Eigen::Index y = 0; y < m.cols(); ++y) total += m(x, y) * m(y, x);
    }
    return total;
}

/// Tr(Pbar) of the projection chain; equal to Tr(GP) and Tr(PG) for the
/// Gibbs kernel of the same partition.
inline double trace_gp(const Kernel& P, const Partition& part) {
    return projection_chain(P, part).matrix.trace();
}

/// Closed form of || alpha P + (1-alpha) G - Pi ||^2_{F,pi} for reversible P:
/// 2 a(1-a) Tr(Pbar) + a^2 Tr(P^2) + (1-a)^2 k - 1.
struct FrobeniusBreakdown {
    double value;
    double trace_p2;
    double trace_pbar;
    int k;
    double alpha;
};

inline FrobeniusBreakdown frobenius_mixture_formula(const Kernel& P, const Partition& part,
                                                    double alpha) {
    if (!P.reversible) {
        throw invariant_error("mixture trace formula requires a reversible kernel");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw invariant_error("mixture trace formula needs alpha in [0,1]");
    }
    const double tp2 = trace_of_square(P.matrix);
    const double tpbar = trace_gp(P, part);
    const double k = part.k();
    const double value =
        2.0 * alpha * (1.0 - alpha) * tpbar + alpha * alpha * tp2 +
        (1.0 - alpha) * (1.0 - alpha) * k - 1.0;
    return FrobeniusBreakdown{value, tp2, tpbar, part.k(), alpha};
}

/// Cheeger-type functional g(S) = flow(S) / (pi(S) pi(S')) whose maximizer
/// is the Frobenius-optimal two-block cut.
inline double g_functional(const Kernel& P, const Cut& S) {
    const int n = P.n();
    if (S.n() != n) throw invariant_error("cut size does not match kernel");
    double flow = 0.0;
    for (int x = 0; x < n; ++x) {
        if (!S.contains(x)) continue;
        for (int y = 0; y < n; ++y) {
            if (!S.contains(y)) flow += P.pi(x) * P.matrix(x, y);
        }
    }
    const double mass = P.pi.mass(S.mask());
    return flow / (mass * (1.0 - mass));
}

/// Conductance-style surrogate h(S) = flow(S) / pi(S); h <= g <= 2h on
/// cuts with pi(S) <= 1/2.
inline double h_functional(const Kernel& P, const Cut& S) {
    const int n = P.n();
    if (S.n() != n) throw invariant_error("cut size does not match kernel");
    double flow = 0.0;
    for (int x = 0; x < n; ++x) {
        if (!S.contains(x)) continue;
        for (int y = 0; y < n; ++y) {
            if (!S.contains(y)) flow += P.pi(x) * P.matrix(x, y);
        }
    }
    return flow / P.pi.mass(S.mask());
}

/// Two-block projection trace Tr(Pbar) = 2 - g(S) for reversible P.
inline double trace_projection_two_block(const Kernel& P, const Cut& S) {
    if (!P.reversible) {
        throw invariant_error("two-block trace identity requires a reversible kernel");
    }
    return 2.0 - g_functional(P, S);
}

/// The unique minimizer alpha* = k / (Tr(P^2) + k) of the mixture objective,
/// valid only when the partition makes Tr(Pbar) vanish.
inline double optimal_alpha_zero_trace(const Kernel& P, const Partition& part) {
    if (!P.reversible) {
        throw invariant_error("optimal alpha formula requires a reversible kernel");
    }
    const double tpbar = trace_gp(P, part);
    if (std::abs(tpbar) > stochastic_tol) {
        throw invariant_error("optimal alpha formula needs Tr(Pbar) = 0, got " +
                              std::to_string(tpbar));
    }
    const double k = part.k();
    return k / (trace_of_square(P.matrix) + k);
}

/// Geometric decay bound (1 - alpha gamma*(P))^{2(l-1)} ||A_alpha - Pi||^2
/// on the squared Frobenius distance of the l-step mixture, l >= 2.
inline double decay_bound(const Kernel& P, const Partition& part, double alpha, int l) {
    if (l < 2) throw invariant_error("decay bound defined for l >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw invariant_error("decay bound needs alpha in (0,1)");
    }
    const double abs_gap = reversible_spectrum(P).abs_gap;
    const Kernel G = gibbs_kernel(P.pi, part);
    const Kernel A = additive_mixture(P, G, alpha);
    return std::pow(1.0 - alpha * abs_gap, 2 * (l - 1)) * frobenius_distance_direct(A);
}

/// Crude variant (n - 1)(1 - alpha gamma*(P))^{2l}, independent of the cut.
inline double decay_bound_crude(const Kernel& P, double alpha, int l) {
    if (l < 2) throw invariant_error("decay bound defined for l >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw invariant_error("decay bound needs alpha in (0,1)");
    }
    const double abs_gap = reversible_spectrum(P).abs_gap;
    return (P.n() - 1) * std::pow(1.0 - alpha * abs_gap, 2 * l);
}

inline void write_breakdown_csv_header(std::ostream& out) {
    out << "alpha,k,trace_pbar,trace_p2,value\n";
}

inline void write_breakdown_csv_row(std::ostream& out, const FrobeniusBreakdown& b) {
    out << std::setprecision(17) << b.alpha << "," << b.k << "," << b.trace_pbar << ","
        << b.trace_p2 << "," << b.value << "\n";
}

}  // namespace addmix
