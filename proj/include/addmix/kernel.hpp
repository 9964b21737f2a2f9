#pragma once
// Markov kernels paired with their stationary law: validation, Gibbs kernels,
// projection chains, additive mixtures, powers and total-variation distances.

#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "addmix/types.hpp"

namespace addmix {

/// Row-stochastic matrix together with its stationary distribution.
/// The reversibility flag is always computed, never trusted.
struct Kernel {
    Matrix matrix;
    Distribution pi;
    bool reversible;

    int n() const { return static_cast<int>(matrix.rows()); }
};

/// Checks every kernel invariant and computes the reversibility flag.
/// Throws invariant_error naming the first violated invariant and index.
inline Kernel validate_kernel(Matrix matrix, Distribution pi) {
    const Eigen::Index n = matrix.rows();
    if (matrix.cols() != n) {
        std::ostringstream os;
        os << "kernel matrix is " << matrix.rows() << "x" << matrix.cols() << ", expected square";
        throw invariant_error(os.str());
    }
    if (pi.size() != n) {
        std::ostringstream os;
        os << "kernel is " << n << "-state but distribution has " << pi.size() << " entries";
        throw invariant_error(os.str());
    }
    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = 0; y < n; ++y) {
            const double v = matrix(x, y);
            if (!(v >= -stochastic_tol) || !(v <= 1.0 + stochastic_tol) || !std::isfinite(v)) {
                std::ostringstream os;
                os << "entry (" << x << "," << y << ") = " << v << " outside [0,1]";
                throw invariant_error(os.str());
            }
        }
        const double s = matrix.row(x).sum();
        if (std::abs(s - 1.0) > stochastic_tol) {
            std::ostringstream os;
            os << "row " << x << " sums to " << s;
            throw invariant_error(os.str());
        }
    }
    // Stationarity: pi K = pi.
    const Vector residual = matrix.transpose() * pi.probs() - pi.probs();
    for (Eigen::Index y = 0; y < n; ++y) {
        if (std::abs(residual[y]) > stochastic_tol) {
            std::ostringstream os;
            os << "stationarity fails at state " << y << ": (pi K - pi)(" << y << ") = "
               << residual[y];
            throw invariant_error(os.str());
        }
    }
    bool reversible = true;
    for (Eigen::Index x = 0; x < n && reversible; ++x) {
        for (Eigen::Index y = x + 1; y < n; ++y) {
            if (std::abs(pi(static_cast<int>(x)) * matrix(x, y) -
                         pi(static_cast<int>(y)) * matrix(y, x)) > stochastic_tol) {
                reversible = false;
                break;
            }
        }
    }
    return Kernel{std::move(matrix), std::move(pi), reversible};
}

/// The rank-one kernel with every row equal to pi.
inline Kernel stationary_projector(const Distribution& pi) {
    const int n = pi.size();
    Matrix m(n, n);
    for (int x = 0; x < n; ++x) m.row(x) = pi.probs().transpose();
    return validate_kernel(std::move(m), pi);
}

/// Gibbs kernel of a partition: within each block, resample from pi
/// restricted to the block. Reversible and idempotent by construction.
inline Kernel gibbs_kernel(const Distribution& pi, const Partition& part) {
    const int n = pi.size();
    if (part.n() != n) {
        throw invariant_error("partition covers " + std::to_string(part.n()) +
                              " states, distribution has " + std::to_string(n));
    }
    const Vector masses = part.block_masses(pi);
    Matrix g = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        const int b = part.block_of(x);
        for (int y : part.block(b)) g(x, y) = pi(y) / masses[b];
    }
    return validate_kernel(std::move(g), pi);
}

/// Projection chain on the k blocks: Pbar(i,j) = sum of pi(x)P(x,y) over
/// x in O_i, y in O_j, divided by pi(O_i). Stationary for the block masses.
inline Kernel projection_chain(const Kernel& P, const Partition& part) {
    const int n = P.n();
    if (part.n() != n) {
        throw invariant_error("partition covers " + std::to_string(part.n()) +
                              " states, kernel has " + std::to_string(n));
    }
    const int k = part.k();
    const Vector masses = part.block_masses(P.pi);
    Matrix pbar = Matrix::Zero(k, k);
    for (int x = 0; x < n; ++x) {
        const int i = part.block_of(x);
        const double w = P.pi(x);
        for (int y = 0; y < n; ++y) pbar(i, part.block_of(y)) += w * P.matrix(x, y);
    }
    for (int i = 0; i < k; ++i) pbar.row(i) /= masses[i];
    return validate_kernel(std::move(pbar), Distribution(masses));
}

/// The additive mixture alpha P + (1 - alpha) G of two kernels sharing pi.
inline Kernel additive_mixture(const Kernel& P, const Kernel& G, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw invariant_error("mixture weight alpha = " + std::to_string(alpha) +
                              " outside [0,1]");
    }
    if (P.n() != G.n() ||
        (P.pi.probs() - G.pi.probs()).cwiseAbs().maxCoeff() > prob_sum_tol) {
        throw invariant_error("mixture components do not share a stationary distribution");
    }
    Matrix a = alpha * P.matrix + (1.0 - alpha) * G.matrix;
    return validate_kernel(std::move(a), P.pi);
}

/// K^l for l >= 1 by repeated squaring.
inline Kernel kernel_power(const Kernel& K, int l) {
    if (l < 1) {
        throw invariant_error("kernel power l = " + std::to_string(l) +
                              " rejected; l must be >= 1 (use the identity explicitly)");
    }
    Matrix acc = Matrix::Identity(K.n(), K.n());
    Matrix base = K.matrix;
    int e = l;
    while (e > 0) {
        if (e & 1) acc = acc * base;
        e >>= 1;
        if (e > 0) base = base * base;
    }
    return validate_kernel(std::move(acc), K.pi);
}

/// Total variation distance (1/2) sum |mu - nu| between two mass vectors.
inline double tv_distance(const Vector& mu, const Vector& nu) {
    if (mu.size() != nu.size()) {
        throw invariant_error("tv distance between vectors of sizes " +
                              std::to_string(mu.size()) + " and " + std::to_string(nu.size()));
    }
    return 0.5 * (mu - nu).cwiseAbs().sum();
}

/// Worst starting state TV distance of K^l from pi, maximized over all rows.
inline double worst_case_tv(const Kernel& K, int l) {
    const Kernel Kl = kernel_power(K, l);
    double worst = 0.0;
    for (int x = 0; x < K.n(); ++x) {
        worst = std::max(worst, tv_distance(Kl.matrix.row(x).transpose(), K.pi.probs()));
    }
    return worst;
}

}  // namespace addmix
