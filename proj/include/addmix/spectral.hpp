#pragma once
// Spectrum of reversible kernels via the symmetric similarity transform,
// plus exhaustive Cheeger constants and the SLEM bound for mixtures.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "addmix/sweep.hpp"

namespace addmix {

// Tolerance for eigenvalue range checks on valid stochastic kernels.
inline constexpr double spectral_tol = 1e-9;

/// Eigenvalues sorted non-increasing, with the second-largest modulus and
/// the two spectral gaps gamma = 1 - lambda_2 and gamma* = 1 - lambda*.
struct SpectrumReport {
    Vector eigenvalues;
    double slem;
    double gap;
    double abs_gap;
};

/// Spectrum of a reversible kernel through D^{1/2} P D^{-1/2} (D = diag(pi))
/// and a dense symmetric eigensolver. Refuses non-reversible input.
inline SpectrumReport reversible_spectrum(const Kernel& P) {
    if (!P.reversible) {
        throw invariant_error("spectrum requested for a non-reversible kernel");
    }
    const int n = P.n();
    Matrix sym(n, n);
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            sym(x, y) = std::sqrt(P.pi(x) / P.pi(y)) * P.matrix(x, y);
        }
    }
    sym = 0.5 * (sym + sym.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
    Vector ev = solver.eigenvalues().reverse();  // non-increasing

    if (std::abs(ev[0] - 1.0) > spectral_tol) {
        throw invariant_error("leading eigenvalue " + std::to_string(ev[0]) +
                              " differs from 1 beyond tolerance");
    }
    for (int i = 0; i < n; ++i) {
        if (ev[i] < -1.0 - spectral_tol || ev[i] > 1.0 + spectral_tol) {
            throw invariant_error("eigenvalue " + std::to_string(ev[i]) + " outside [-1, 1]");
        }
    }
    const double slem = n > 1 ? std::max(std::abs(ev[1]), std::abs(ev[n - 1])) : 0.0;
    const double gap = n > 1 ? 1.0 - ev[1] : 1.0;
    return SpectrumReport{std::move(ev), slem, gap, 1.0 - slem};
}

/// Classical and symmetrised Cheeger constants with their minimizing cuts,
/// by exhaustive enumeration (n <= 25). Ties: smallest bitmask.
struct CheegerReport {
    double classical;
    Cut classical_cut;
    double symmetrised;
    Cut symmetrised_cut;
};

inline CheegerReport cheeger_constants(const Kernel& P) {
    const int n = P.n();
    CutMinimizer classical, symmetrised;
    sweep_nontrivial_cuts(
        P.pi, {&P.matrix},
        [&](std::uint64_t mask, double mass, const std::vector<CutFlowStats>& stats) {
            const double flow = stats[0].flow_out;
            if (mass <= 0.5 + 1e-12) classical.offer(mask, flow / mass);
            symmetrised.offer(mask, flow / (mass * (1.0 - mass)));
        });
    return CheegerReport{classical.value(), Cut(classical.mask(), n), symmetrised.value(),
                         Cut(symmetrised.mask(), n)};
}

/// Upper bound 1 - alpha * gamma*(P) on the SLEM of any mixture
/// alpha P + (1 - alpha) G with a Gibbs kernel G.
inline double slem_mixture_bound(const Kernel& P, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw invariant_error("slem bound needs alpha in [0,1]");
    }
    return 1.0 - alpha * reversible_spectrum(P).abs_gap;
}

inline void write_cheeger_csv(std::ostream& out, const CheegerReport& r) {
    out << "classical,classical_cut,symmetrised,symmetrised_cut\n"
        << std::setprecision(17) << r.classical << "," << r.classical_cut.mask() << ","
        << r.symmetrised << "," << r.symmetrised_cut.mask() << "\n";
}

}  // namespace addmix
