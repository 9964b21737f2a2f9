#pragma once
// Lifted chain on X x {-1,+1}: the auxiliary coordinate records whether the
// Gibbs kernel (+1) or the base sampler (-1) produced the move. Its first
// coordinate marginal is the additive mixture.

#include <cmath>
#include <string>
#include <utility>

#include "addmix/kernel.hpp"

namespace addmix {

/// 2n x 2n row-stochastic kernel on pairs (x, sigma). Lifted index layout:
/// (x, +1) -> x and (x, -1) -> x + n. The stationary law is the product
/// pi (x) R with R(+1) = 1 - alpha, R(-1) = alpha; it is stored as a raw
/// vector because it has zero entries at alpha in {0, 1}.
struct LiftedKernel {
    Matrix matrix;
    double alpha;
    Vector pi_tilde;
    int base_n;

    int lifted_index(int x, int sigma) const { return sigma > 0 ? x : x + base_n; }
};

inline LiftedKernel lifted_kernel(const Kernel& P, const Kernel& G, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw invariant_error("lift weight alpha = " + std::to_string(alpha) + " outside [0,1]");
    }
    if (P.n() != G.n() ||
        (P.pi.probs() - G.pi.probs()).cwiseAbs().maxCoeff() > prob_sum_tol) {
        throw invariant_error("lift components do not share a stationary distribution");
    }
    const int n = P.n();
    Matrix q(2 * n, 2 * n);
    // Rows are independent of the current auxiliary coordinate.
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            const double to_plus = (1.0 - alpha) * G.matrix(x, y);
            const double to_minus = alpha * P.matrix(x, y);
            q(x, y) = to_plus;
            q(x + n, y) = to_plus;
            q(x, y + n) = to_minus;
            q(x + n, y + n) = to_minus;
        }
    }
    Vector pt(2 * n);
    for (int x = 0; x < n; ++x) {
        pt[x] = (1.0 - alpha) * P.pi(x);
        pt[x + n] = alpha * P.pi(x);
    }
    return LiftedKernel{std::move(q), alpha, std::move(pt), n};
}

/// Sums the lifted transition over the auxiliary target coordinate; returns
/// the marginal kernel on X, which equals the additive mixture entrywise.
/// Errors if the two auxiliary source rows disagree.
inline Kernel marginal_first_coordinate(const LiftedKernel& Q) {
    const int n = Q.base_n;
    const double row_consistency_tol = 1e-12;
    Matrix m(n, n);
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            for (int col : {y, y + n}) {
                if (std::abs(Q.matrix(x, col) - Q.matrix(x + n, col)) > row_consistency_tol) {
                    throw invariant_error(
                        "lifted rows depend on the auxiliary coordinate at state " +
                        std::to_string(x));
                }
            }
            m(x, y) = Q.matrix(x, y) + Q.matrix(x, y + n);
        }
    }
    Vector pi(n);
    for (int x = 0; x < n; ++x) pi[x] = Q.pi_tilde[x] + Q.pi_tilde[x + n];
    return validate_kernel(std::move(m), Distribution(std::move(pi)));
}

}  // namespace addmix
