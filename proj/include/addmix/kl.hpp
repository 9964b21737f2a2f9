#pragma once
// KL divergences to stationarity: distribution and kernel divergences,
// Shannon entropy, the lifted-chain identity, the entropy-optimal partition
// and the convexity bound for additive mixtures. Natural log throughout;
// +infinity is represented explicitly.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <vector>

#include "addmix/kernel.hpp"

namespace addmix {

/// sum mu(x) log(mu(x)/nu(x)) with 0 log(0/a) = 0; +infinity when some
/// mu(x) > 0 has nu(x) = 0.
inline double kl_divergence(const Vector& mu, const Vector& nu) {
    if (mu.size() != nu.size()) {
        throw invariant_error("KL divergence between vectors of different sizes");
    }
    double total = 0.0;
    for (Eigen::Index x = 0; x < mu.size(); ++x) {
        if (mu[x] == 0.0) continue;
        if (nu[x] == 0.0) return std::numeric_limits<double>::infinity();
        total += mu[x] * std::log(mu[x] / nu[x]);
    }
    return total;
}

/// Kernel divergence sum_{x,y} pi(x) P(x,y) log(P(x,y)/Q(x,y)), same
/// conventions as kl_divergence.
inline double kl_kernels(const Kernel& P, const Kernel& Q) {
    if (P.n() != Q.n() ||
        (P.pi.probs() - Q.pi.probs()).cwiseAbs().maxCoeff() > prob_sum_tol) {
        throw invariant_error("kernel divergence needs a shared stationary distribution");
    }
    double total = 0.0;
    for (int x = 0; x < P.n(); ++x) {
        for (int y = 0; y < P.n(); ++y) {
            const double p = P.matrix(x, y);
            if (p == 0.0) continue;
            const double q = Q.matrix(x, y);
            if (q == 0.0) return std::numeric_limits<double>::infinity();
            total += P.pi(x) * p * std::log(p / q);
        }
    }
    return total;
}

/// -sum p log p with 0 log 0 = 0.
inline double shannon_entropy(const Vector& p) {
    double h = 0.0;
    for (Eigen::Index x = 0; x < p.size(); ++x) {
        if (p[x] > 0.0) h -= p[x] * std::log(p[x]);
    }
    return h;
}

/// KL(G || Pi) of the Gibbs kernel, which collapses to the entropy of the
/// block-mass vector H(pibar).
inline double kl_gibbs(const Partition& part, const Distribution& pi) {
    return shannon_entropy(part.block_masses(pi));
}

/// KL of the lifted chain Q_alpha from its stationary projector: the convex
/// combination (1-alpha) KL(G||Pi) + alpha KL(P||Pi).
inline double kl_lifted(const Kernel& P, const Partition& part, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw invariant_error("lifted KL needs alpha in [0,1]");
    }
    const Kernel pi_kernel = stationary_projector(P.pi);
    const Kernel G = gibbs_kernel(P.pi, part);
    return (1.0 - alpha) * kl_kernels(G, pi_kernel) + alpha * kl_kernels(P, pi_kernel);
}

/// The k-partition minimizing H(pibar): singletons on the k-1 smallest
/// masses and one block holding the rest. Mass ties break by state index.
inline Partition optimal_entropy_partition(const Distribution& pi, int k) {
    const int n = pi.size();
    if (k < 2 || k > n) {
        throw invariant_error("entropy-optimal partition needs 2 <= k <= n, got k = " +
                              std::to_string(k));
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return pi(a) < pi(b); });
    std::vector<int> block_of(n, k - 1);
    for (int i = 0; i < k - 1; ++i) block_of[order[i]] = i;
    return Partition(std::move(block_of), k);
}

/// Convexity bound (1-alpha) H(pibar) + alpha KL(P||Pi) on KL(A_alpha||Pi),
/// returned together with the actual divergence of the mixture.
struct KLBound {
    double bound;
    double actual;
};

inline KLBound kl_mixture_bound(const Kernel& P, const Partition& part, double alpha) {
    const Kernel pi_kernel = stationary_projector(P.pi);
    const Kernel G = gibbs_kernel(P.pi, part);
    const Kernel A = additive_mixture(P, G, alpha);
    const double bound =
        (1.0 - alpha) * kl_gibbs(part, P.pi) + alpha * kl_kernels(P, pi_kernel);
    return KLBound{bound, kl_kernels(A, pi_kernel)};
}

struct KLReport {
    double alpha;
    double kl_P;
    double kl_G;
    double entropy_pbar;
    double lifted;
    double mixture_bound;
    double actual;
};

inline KLReport kl_report(const Kernel& P, const Partition& part, double alpha) {
    const Kernel pi_kernel = stationary_projector(P.pi);
    const Kernel G = gibbs_kernel(P.pi, part);
    const double kl_P = kl_kernels(P, pi_kernel);
    const double kl_G = kl_kernels(G, pi_kernel);
    const double entropy = kl_gibbs(part, P.pi);
    const KLBound bound = kl_mixture_bound(P, part, alpha);
    return KLReport{alpha,
                    kl_P,
                    kl_G,
                    entropy,
                    (1.0 - alpha) * kl_G + alpha * kl_P,
                    bound.bound,
                    bound.actual};
}

inline void write_kl_csv_header(std::ostream& out) {
    out << "alpha,kl_P,kl_G,entropy_pbar,lifted,mixture_bound,actual\n";
}

inline void write_kl_csv_row(std::ostream& out, const KLReport& r) {
    out << std::setprecision(17) << r.alpha << "," << r.kl_P << "," << r.kl_G << ","
        << r.entropy_pbar << "," << r.lifted << "," << r.mixture_bound << "," << r.actual
        << "\n";
}

}  // namespace addmix
