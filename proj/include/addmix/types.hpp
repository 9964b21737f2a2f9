#pragma once
// Core value types shared by every module: strictly positive probability
// vectors, state-space partitions, and two-block cuts stored as bitmasks.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "addmix/errors.hpp"

namespace addmix {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Normalization tolerance for probability vectors.
inline constexpr double prob_sum_tol = 1e-12;
// Tolerance for row-stochasticity, stationarity and detailed-balance checks.
inline constexpr double stochastic_tol = 1e-10;
// Dense desk-scale cap on state-space size.
inline constexpr int max_states = 4096;
// Subset enumeration cap (2^25 evaluations).
inline constexpr int max_enumeration_states = 25;

/// Probability mass function with strictly positive entries summing to one.
class Distribution {
public:
    explicit Distribution(Vector probs) : probs_(std::move(probs)) {
        const auto n = probs_.size();
        if (n < 1 || n > max_states) {
            throw invariant_error("distribution size " + std::to_string(n) +
                                  " outside [1, " + std::to_string(max_states) + "]");
        }
        for (Eigen::Index x = 0; x < n; ++x) {
            if (!(probs_[x] > 0.0)) {
                std::ostringstream os;
                os << "distribution entry " << x << " = " << probs_[x] << " is not strictly positive";
                throw invariant_error(os.str());
            }
        }
        const double total = probs_.sum();
        if (std::abs(total - 1.0) > prob_sum_tol) {
            std::ostringstream os;
            os << "distribution sums to " << total << ", expected 1 within " << prob_sum_tol;
            throw invariant_error(os.str());
        }
    }

    int size() const { return static_cast<int>(probs_.size()); }
    double operator()(int x) const { return probs_[x]; }
    const Vector& probs() const { return probs_; }

    /// Total mass of the states selected by a bitmask (states 0..n-1 as bits).
    double mass(std::uint64_t mask) const {
        double m = 0.0;
        for (int x = 0; x < size(); ++x) {
            if (mask >> x & 1u) m += probs_[x];
        }
        return m;
    }

private:
    Vector probs_;
};

/// Nontrivial two-block split of an n-state space, S vs its complement.
/// Stored as a bitmask, so n is limited to 64 states; the exhaustive
/// searches impose the tighter max_enumeration_states themselves.
class Cut {
public:
    Cut(std::uint64_t members, int n) : members_(members), n_(n) {
        if (n < 2 || n > 64) {
            throw invariant_error("cut over " + std::to_string(n) + " states, need 2 <= n <= 64");
        }
        const std::uint64_t full = full_mask(n);
        if ((members & ~full) != 0) {
            throw invariant_error("cut bitmask has bits outside the state space");
        }
        if (members == 0 || members == full) {
            throw invariant_error("cut must be nonempty and not the full state space");
        }
    }

    std::uint64_t mask() const { return members_; }
    int n() const { return n_; }
    bool contains(int x) const { return (members_ >> x & 1u) != 0; }
    int size() const { return std::popcount(members_); }
    std::uint64_t complement_mask() const { return full_mask(n_) & ~members_; }
    Cut complement() const { return Cut(complement_mask(), n_); }

    static std::uint64_t full_mask(int n) {
        return n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    }

    friend bool operator==(const Cut& a, const Cut& b) {
        return a.members_ == b.members_ && a.n_ == b.n_;
    }

private:
    std::uint64_t members_;
    int n_;
};

/// Assignment of n states into k nonempty disjoint blocks.
class Partition {
public:
    Partition(std::vector<int> block_of, int k) : block_of_(std::move(block_of)), k_(k) {
        const int n = static_cast<int>(block_of_.size());
        if (n < 1 || n > max_states) {
            throw invariant_error("partition over " + std::to_string(n) + " states outside [1, " +
                                  std::to_string(max_states) + "]");
        }
        if (k < 1 || k > n) {
            throw invariant_error("partition block count " + std::to_string(k) + " outside [1, n]");
        }
        blocks_.assign(k, {});
        for (int x = 0; x < n; ++x) {
            const int b = block_of_[x];
            if (b < 0 || b >= k) {
                throw invariant_error("state " + std::to_string(x) + " assigned to block " +
                                      std::to_string(b) + ", expected [0, " + std::to_string(k) + ")");
            }
            blocks_[b].push_back(x);
        }
        for (int b = 0; b < k; ++b) {
            if (blocks_[b].empty()) {
                throw invariant_error("block " + std::to_string(b) + " is empty");
            }
        }
    }

    static Partition singletons(int n) {
        std::vector<int> b(n);
        for (int x = 0; x < n; ++x) b[x] = x;
        return Partition(std::move(b), n);
    }

    static Partition single_block(int n) { return Partition(std::vector<int>(n, 0), 1); }

    /// Two-block partition from a cut: members of S form block 0.
    static Partition from_cut(const Cut& cut) {
        std::vector<int> b(cut.n());
        for (int x = 0; x < cut.n(); ++x) b[x] = cut.contains(x) ? 0 : 1;
        return Partition(std::move(b), 2);
    }

    int n() const { return static_cast<int>(block_of_.size()); }
    int k() const { return k_; }
    int block_of(int x) const { return block_of_[x]; }
    const std::vector<int>& block(int b) const { return blocks_[b]; }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }

    /// Block masses (pi(O_1), ..., pi(O_k)).
    Vector block_masses(const Distribution& pi) const {
        Vector m = Vector::Zero(k_);
        for (int x = 0; x < n(); ++x) m[block_of_[x]] += pi(x);
        return m;
    }

private:
    std::vector<int> block_of_;
    int k_;
    std::vector<std::vector<int>> blocks_;
};

}  // namespace addmix
