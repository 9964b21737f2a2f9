#pragma once
// Curie-Weiss benchmark with geometrically decaying interaction 2^{-|j-i|}:
// Hamiltonian, Gibbs distribution at temperature T, single-spin-flip Glauber
// dynamics, magnetisation and the sign-of-magnetisation cut.

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "addmix/kernel.hpp"

namespace addmix {

struct ModelParams {
    int d;
    double T;
    double h;
};

inline void validate_model(const ModelParams& p) {
    if (p.d < 1) throw invariant_error("spin count d must be >= 1");
    if (!(p.T > 0.0)) throw invariant_error("temperature must be positive");
}

inline void require_dense_feasible(const ModelParams& p) {
    validate_model(p);
    if (p.d > 12) {
        throw infeasible_error("d = " + std::to_string(p.d) +
                               " gives more than 4096 states; dense construction capped at d = 12");
    }
}

/// Spin configuration on {-1,+1}^d, encoded so that bit b of the index is
/// set exactly when spin b is +1.
struct SpinConfig {
    std::uint32_t index;
    int d;

    int spin(int i) const { return (index >> i & 1u) != 0 ? 1 : -1; }
};

/// H(x) = -sum_{i,j} 2^{-|j-i|} x^i x^j - h sum_i x^i, the double sum running
/// over all ordered pairs including i = j. The i = j terms add the constant
/// -d, which cancels in the Gibbs distribution and in energy differences.
inline double hamiltonian(const SpinConfig& x, const ModelParams& params) {
    validate_model(params);
    double interaction = 0.0;
    for (int i = 0; i < params.d; ++i) {
        for (int j = 0; j < params.d; ++j) {
            interaction += std::ldexp(static_cast<double>(x.spin(i) * x.spin(j)),
                                      -std::abs(j - i));
        }
    }
    double field = 0.0;
    for (int i = 0; i < params.d; ++i) field += x.spin(i);
    return -interaction - params.h * field;
}

namespace detail {

inline std::vector<double> all_energies(const ModelParams& params) {
    const int n = 1 << params.d;
    std::vector<double> energy(n);
    for (int idx = 0; idx < n; ++idx) {
        energy[idx] = hamiltonian(SpinConfig{static_cast<std::uint32_t>(idx), params.d}, params);
    }
    return energy;
}

}  // namespace detail

/// Gibbs distribution pi(x) proportional to exp(-H(x)/T), normalized with a
/// max-shifted exponential sum.
inline Distribution gibbs_distribution(const ModelParams& params) {
    require_dense_feasible(params);
    const auto energy = detail::all_energies(params);
    const int n = static_cast<int>(energy.size());
    double max_log = -energy[0] / params.T;
    for (int i = 1; i < n; ++i) max_log = std::max(max_log, -energy[i] / params.T);
    Vector w(n);
    for (int i = 0; i < n; ++i) w[i] = std::exp(-energy[i] / params.T - max_log);
    return Distribution(w / w.sum());
}

/// Glauber dynamics: pick one of the d coordinates uniformly, flip it, and
/// accept with the Metropolis probability exp(-(H(y)-H(x))_+ / T). The
/// diagonal absorbs the rejected mass. Reversible for gibbs_distribution.
inline Kernel glauber_kernel(const ModelParams& params) {
    require_dense_feasible(params);
    const auto energy = detail::all_energies(params);
    const int n = static_cast<int>(energy.size());
    Matrix p = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        double off = 0.0;
        for (int i = 0; i < params.d; ++i) {
            const int y = x ^ (1 << i);
            const double rise = energy[y] - energy[x];
            p(x, y) = std::exp(-std::max(rise, 0.0) / params.T) / params.d;
            off += p(x, y);
        }
        p(x, x) = 1.0 - off;
    }
    return validate_kernel(std::move(p), gibbs_distribution(params));
}

/// m(x) = sum_i x^i, ranging over {-d, -d+2, ..., d}.
inline int magnetisation(const SpinConfig& x) {
    const std::uint32_t live = x.d >= 32 ? ~0u : ((1u << x.d) - 1u);
    return 2 * std::popcount(x.index & live) - x.d;
}

/// The cut S = { x : m(x) >= 0 }. Needs d <= 6 so the 2^d states fit the
/// bitmask representation.
inline Cut magnetisation_cut(int d) {
    if (d < 1) throw invariant_error("spin count d must be >= 1");
    if (d > 6) {
        throw infeasible_error("magnetisation cut over 2^" + std::to_string(d) +
                               " states does not fit a 64-bit cut mask");
    }
    const int n = 1 << d;
    std::uint64_t members = 0;
    for (int idx = 0; idx < n; ++idx) {
        if (magnetisation(SpinConfig{static_cast<std::uint32_t>(idx), d}) >= 0) {
            members |= std::uint64_t{1} << idx;
        }
    }
    return Cut(members, n);
}

}  // namespace addmix
