#pragma once

#include <stdexcept>
#include <string>

namespace addmix {

// A numerical or structural invariant was violated (bad row sum, failed
// stationarity, alpha out of range, ...). CLI maps this to exit code 2.
struct invariant_error : std::runtime_error {
    explicit invariant_error(const std::string& what) : std::runtime_error(what) {}
};

// The requested computation is too large for the exact methods used here
// (subset enumeration, dense spin-model construction). CLI exit code 3.
struct infeasible_error : std::runtime_error {
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace addmix
