#pragma once
// Gray-code enumeration of nontrivial cuts with O(n) incremental updates of
// the pi-weighted flow statistics every set functional here is built from.
// Stats are refreshed from scratch periodically to cap accumulated drift.

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "addmix/kernel.hpp"

namespace addmix {

/// Flow statistics of a cut S for one matrix M under weights pi:
///   flow_out = sum_{x in S,  y in S'} pi(x) M(x,y)
///   flow_in  = sum_{x in S', y in S } pi(x) M(x,y)
///   self_in  = sum_{x,y in S }        pi(x) M(x,y)
///   self_out = sum_{x,y in S'}        pi(x) M(x,y)
struct CutFlowStats {
    double flow_out = 0.0;
    double flow_in = 0.0;
    double self_in = 0.0;
    double self_out = 0.0;
};

inline CutFlowStats compute_cut_stats(const Distribution& pi, const Matrix& m,
                                      std::uint64_t mask) {
    CutFlowStats s;
    const int n = pi.size();
    for (int x = 0; x < n; ++x) {
        const bool xin = (mask >> x & 1u) != 0;
        for (int y = 0; y < n; ++y) {
            const double w = pi(x) * m(x, y);
            const bool yin = (mask >> y & 1u) != 0;
            if (xin && yin) s.self_in += w;
            else if (xin) s.flow_out += w;
            else if (yin) s.flow_in += w;
            else s.self_out += w;
        }
    }
    return s;
}

/// Visits every nontrivial subset of the n-state space exactly once in
/// Gray-code order, passing (mask, pi(S), stats-per-matrix). The matrices
/// must all be n x n; typical calls pass {P} or {P, P^2}.
template <typename Visitor>
void sweep_nontrivial_cuts(const Distribution& pi, const std::vector<const Matrix*>& mats,
                           Visitor&& visit) {
    const int n = pi.size();
    if (n < 2) throw invariant_error("cut sweep needs at least 2 states");
    if (n > max_enumeration_states) {
        throw infeasible_error("cut sweep over n = " + std::to_string(n) + " states exceeds " +
                               std::to_string(max_enumeration_states));
    }
    const std::uint64_t full = Cut::full_mask(n);
    const std::uint64_t total = std::uint64_t{1} << n;
    const std::uint64_t refresh_period = 4096;

    std::vector<CutFlowStats> stats(mats.size());
    for (std::size_t j = 0; j < mats.size(); ++j) stats[j] = compute_cut_stats(pi, *mats[j], 0);
    double mass = 0.0;
    std::uint64_t mask = 0;

    for (std::uint64_t i = 1; i < total; ++i) {
        const int t = std::countr_zero(i);
        const std::uint64_t bit = std::uint64_t{1} << t;
        const bool adding = (mask & bit) == 0;
        const double pt = pi(t);
        mass += adding ? pt : -pt;

        for (std::size_t j = 0; j < mats.size(); ++j) {
            const Matrix& m = *mats[j];
            // Row/column sums of element t split by current membership,
            // excluding t itself.
            double row_in = 0.0, row_comp = 0.0, col_in = 0.0, col_comp = 0.0;
            for (int y = 0; y < n; ++y) {
                if (y == t) continue;
                if (mask >> y & 1u) {
                    row_in += m(t, y);
                    col_in += pi(y) * m(y, t);
                } else {
                    row_comp += m(t, y);
                    col_comp += pi(y) * m(y, t);
                }
            }
            const double diag = pt * m(t, t);
            CutFlowStats& s = stats[j];
            if (adding) {
                s.self_in += diag + pt * row_in + col_in;
                s.self_out -= diag + pt * row_comp + col_comp;
                s.flow_out += pt * row_comp - col_in;
                s.flow_in += col_comp - pt * row_in;
            } else {
                s.self_in -= diag + pt * row_in + col_in;
                s.self_out += diag + pt * row_comp + col_comp;
                s.flow_out -= pt * row_comp - col_in;
                s.flow_in -= col_comp - pt * row_in;
            }
        }
        mask ^= bit;

        if ((i & (refresh_period - 1)) == 0) {
            mass = pi.mass(mask);
            for (std::size_t j = 0; j < mats.size(); ++j) {
                stats[j] = compute_cut_stats(pi, *mats[j], mask);
            }
        }
        if (mask != 0 && mask != full) visit(mask, mass, stats);
    }
}

/// Running argmin over cuts with deterministic tie resolution: values within
/// tie_tol count as equal and the lexicographically smallest bitmask wins.
class CutMinimizer {
public:
    explicit CutMinimizer(double tie_tol = 1e-12) : tol_(tie_tol) {}

    void offer(std::uint64_t mask, double value) {
        if (!found_) {
            found_ = true;
            best_value_ = value;
            best_mask_ = mask;
            return;
        }
        if (value < best_value_ - tol_) {
            best_value_ = value;
            best_mask_ = mask;
        } else if (value <= best_value_ + tol_) {
            if (mask < best_mask_) best_mask_ = mask;
            if (value < best_value_) best_value_ = value;
        }
    }

    bool found() const { return found_; }
    double value() const { return best_value_; }
    std::uint64_t mask() const { return best_mask_; }

private:
    double tol_;
    bool found_ = false;
    double best_value_ = 0.0;
    std::uint64_t best_mask_ = 0;
};

}  // namespace addmix
