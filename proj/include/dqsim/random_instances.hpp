#pragma once

#include "dqsim/rng.hpp"
#include "dqsim/state.hpp"

namespace dqsim {

/// Haar-like unitary: complex Gaussian matrix orthonormalized column by
/// column (two Gram-Schmidt passes).
CMatrix random_unitary(std::size_t dim, SplitMix64& rng);

/// Normalized complex Gaussian vector as a state.
PureState random_pure_state(int n_qubits, SplitMix64& rng);
DensityMatrix random_density(std::size_t dim, SplitMix64& rng);

std::vector<std::size_t> random_permutation(std::size_t n, SplitMix64& rng);

/// Random gate program: Hadamards, 1- and 2-qubit Haar-like dense gates,
/// controlled-not oracles, and phase flips.
Circuit random_circuit(int n_qubits, int n_gates, SplitMix64& rng);

}  // namespace dqsim
