#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dqsim {

using Complex = std::complex<double>;

/// Disjoint index sets covering {0, ..., N-1}; each set sorted ascending,
/// sets ordered by their smallest element.
using BlockPartition = std::vector<std::vector<std::size_t>>;

/// Thrown when an iterative scaling run exhausts its sweep budget.
struct NonConvergenceError : std::runtime_error {
    long iterations;
    double residual;
    NonConvergenceError(long iters, double res)
        : std::runtime_error("scaling did not converge after " + std::to_string(iters) +
                             " sweeps (residual " + std::to_string(res) + ")"),
          iterations(iters),
          residual(res) {}
};

/// Thrown when a requested feasibility pre-check fails.
struct InfeasibleTargetsError : std::runtime_error {
    InfeasibleTargetsError() : std::runtime_error("no nonnegative matrix with the given support matches the marginal targets") {}
};

/// Divides by the current sum, then nudges the largest entry so the vector
/// sums to 1 up to the last ulp. Entries must be nonnegative with positive sum.
void normalize_exact(std::vector<double>& v);

/// Total-variation distance between two probability vectors of equal length.
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace dqsim
