#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "dqsim/common.hpp"
#include "dqsim/matrix.hpp"

namespace dqsim {

/// Default cap on the dense dimension (2^12): the dynamics layer needs full
/// N x N matrices, so anything bigger must be requested explicitly.
inline constexpr std::size_t kDefaultMaxDim = std::size_t{1} << 12;

// ------------------------------------------------------------------ states

struct PureState {
    std::vector<Complex> amplitudes;
    int n_qubits = 0;

    std::size_t dim() const { return amplitudes.size(); }
    static PureState zero(int n_qubits);
    static PureState basis(int n_qubits, std::uint64_t index);
};

/// Throws std::invalid_argument if the norm is off by more than 1e-12 or the
/// length is not 2^n_qubits.
void validate_pure(const PureState& psi);

/// Any finite dimension is allowed: dynamics act on blocks of arbitrary size,
/// not just full qubit registers.
struct DensityMatrix {
    CMatrix entries;

    std::size_t dim() const { return entries.rows(); }
    static DensityMatrix from_pure(const PureState& psi);
    static DensityMatrix from_amplitudes(const std::vector<Complex>& amplitudes);
    static DensityMatrix basis(std::size_t dim, std::uint64_t index);
    static DensityMatrix maximally_mixed(std::size_t dim);
};

/// Cheap invariants: Hermitian and unit trace within 1e-12.
void validate_density(const DensityMatrix& rho);
/// Full check including the eigenvalue floor (dense eigensolve, O(N^3)).
void validate_density_full(const DensityMatrix& rho, double eigen_floor = -1e-10);

// ------------------------------------------------------------------- gates

struct HadamardGate {
    int target;
    bool operator==(const HadamardGate&) const = default;
};

/// Hadamard on each listed qubit (a bitwise Fourier layer).
struct HadamardLayerGate {
    std::vector<int> targets;
    bool operator==(const HadamardLayerGate&) const = default;
};

/// |X>|r> -> |X>|r xor table[X]> on the listed input/output qubit registers.
/// Bit t of the table index is input qubit in[t]; same convention for out.
struct XorOracleGate {
    std::vector<std::uint32_t> table;
    std::vector<int> in;
    std::vector<int> out;
    bool operator==(const XorOracleGate&) const = default;
};

/// Flips the sign of one computational-basis amplitude.
struct PhaseFlipGate {
    std::uint64_t index;
    bool operator==(const PhaseFlipGate&) const = default;
};

/// |x> -> |table[x]> over the full basis.
struct PermutationGate {
    std::vector<std::uint64_t> table;
    bool operator==(const PermutationGate&) const = default;
};

/// Explicit 2^k x 2^k matrix on the listed target qubits (row-major,
/// bit t of the local index = global bit targets[t]).
struct DenseUnitaryGate {
    std::vector<int> targets;
    CMatrix matrix;
    bool operator==(const DenseUnitaryGate&) const = default;
};

using GateOp = std::variant<HadamardGate, HadamardLayerGate, XorOracleGate, PhaseFlipGate,
                            PermutationGate, DenseUnitaryGate>;

struct Circuit {
    int n_qubits = 0;
    std::vector<GateOp> gates;

    std::size_t dim() const { return std::size_t{1} << n_qubits; }
    bool operator==(const Circuit&) const = default;
};

/// Structural validation: targets in range, disjoint oracle registers,
/// bijective permutation tables, unitary dense blocks (within 1e-10).
void validate_circuit(const Circuit& circuit);

// -------------------------------------------------------------- operations

/// In-place application to a statevector of length 2^n_qubits.
void apply_circuit(const Circuit& circuit, std::vector<Complex>& psi);

/// Column i of the compiled unitary, i.e. the circuit applied to |i>.
std::vector<Complex> circuit_column(const Circuit& circuit, std::uint64_t index);

/// Compiled N x N unitary (ordered product of the gate matrices).
/// Throws std::invalid_argument when 2^n_qubits exceeds max_dim.
CMatrix circuit_unitary(const Circuit& circuit, std::size_t max_dim = kDefaultMaxDim);

/// U rho U†.
DensityMatrix evolve(const DensityMatrix& rho, const CMatrix& u);

/// Diagonal of rho: entries clamped at 0, renormalized to sum exactly 1.
std::vector<double> born_distribution(const DensityMatrix& rho);

/// |psi_i|^2 without renormalization.
std::vector<double> born_probs(const std::vector<Complex>& psi);

/// Initial Hadamard layer plus `iterations` rounds of phase-flip + diffusion.
Circuit grover_circuit(int n_qubits, std::uint64_t marked, int iterations);

/// sin^2((2t+1) asin(1/sqrt(N))): marked-state probability after t rounds.
double grover_success_probability(std::size_t n_items, int iterations);

}  // namespace dqsim
