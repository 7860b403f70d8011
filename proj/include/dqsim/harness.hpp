#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dqsim/dynamics.hpp"

namespace dqsim {

/// Shared command-line configuration. Exit codes across all commands:
/// 0 success, 1 property-suite assertion failure, 2 invalid input,
/// 3 numerical non-convergence.
struct RunConfig {
    DynamicsKind model = DynamicsKind::SD;
    std::uint64_t seed = 0;
    std::size_t shots = 1024;
    double tol = 1e-10;
    long max_iter = 100000;
    double zero_tol = 1e-12;
    int max_qubits = 12;
    int threads = 0;  // 0 keeps the process default
    std::string output;  // empty writes to stdout
};

/// Full CLI entry point; `args` excludes the program name. All program
/// output goes through `out` (or the --output file) and diagnostics through
/// `err`, which keeps runs capturable for byte-identity checks.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dqsim
