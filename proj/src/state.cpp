#include "dqsim/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dqsim/kernels.hpp"

namespace dqsim {

PureState PureState::zero(int n_qubits) { return basis(n_qubits, 0); }

PureState PureState::basis(int n_qubits, std::uint64_t index) {
    PureState psi;
    psi.n_qubits = n_qubits;
    psi.amplitudes.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    psi.amplitudes.at(index) = Complex{1.0, 0.0};
    return psi;
}

void validate_pure(const PureState& psi) {
    if (psi.n_qubits < 0 || psi.amplitudes.size() != (std::size_t{1} << psi.n_qubits)) {
        throw std::invalid_argument("pure state length is not 2^n_qubits");
    }
    double norm = 0.0;
    for (const Complex& a : psi.amplitudes) norm += std::norm(a);
    if (std::fabs(norm - 1.0) > 1e-12) {
        throw std::invalid_argument("pure state norm deviates from 1 by " +
                                    std::to_string(std::fabs(norm - 1.0)));
    }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    return from_amplitudes(psi.amplitudes);
}

DensityMatrix DensityMatrix::from_amplitudes(const std::vector<Complex>& amplitudes) {
    const std::size_t n = amplitudes.size();
    DensityMatrix rho;
    rho.entries = CMatrix(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            rho.entries(r, c) = amplitudes[r] * std::conj(amplitudes[c]);
        }
    }
    return rho;
}

DensityMatrix DensityMatrix::basis(std::size_t dim, std::uint64_t index) {
    DensityMatrix rho;
    rho.entries = CMatrix(dim, dim);
    rho.entries(index, index) = Complex{1.0, 0.0};
    return rho;
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    DensityMatrix rho;
    rho.entries = CMatrix(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        rho.entries(i, i) = Complex{1.0 / static_cast<double>(dim), 0.0};
    }
    return rho;
}

void validate_density(const DensityMatrix& rho) {
    if (rho.entries.rows() != rho.entries.cols() || rho.entries.rows() == 0) {
        throw std::invalid_argument("density matrix is not square");
    }
    if (hermiticity_error(rho.entries) > 1e-12) {
        throw std::invalid_argument("density matrix is not Hermitian within 1e-12");
    }
    if (std::fabs(trace_real(rho.entries) - 1.0) > 1e-12) {
        throw std::invalid_argument("density matrix trace deviates from 1");
    }
}

void validate_density_full(const DensityMatrix& rho, double eigen_floor) {
    validate_density(rho);
    const double lo = min_hermitian_eigenvalue(rho.entries);
    if (lo < eigen_floor) {
        throw std::invalid_argument("density matrix has eigenvalue " + std::to_string(lo) +
                                    " below the floor");
    }
}

// ------------------------------------------------------------------- gates

namespace {

void check_target(int t, int n_qubits, const char* gate) {
    if (t < 0 || t >= n_qubits) {
        throw std::invalid_argument(std::string(gate) + ": target qubit " + std::to_string(t) +
                                    " out of range [0, " + std::to_string(n_qubits) + ")");
    }
}

// Full-basis permutation realizing an xor oracle.
std::vector<std::uint64_t> xor_oracle_permutation(const XorOracleGate& g, std::size_t dim) {
    std::vector<std::uint64_t> perm(dim);
    for (std::uint64_t x = 0; x < dim; ++x) {
        std::uint64_t in_value = 0;
        for (std::size_t t = 0; t < g.in.size(); ++t) in_value |= ((x >> g.in[t]) & 1) << t;
        const std::uint64_t f = g.table[in_value];
        std::uint64_t y = x;
        for (std::size_t t = 0; t < g.out.size(); ++t) y ^= ((f >> t) & 1ULL) << g.out[t];
        perm[x] = y;
    }
    return perm;
}

struct GateValidator {
    const Circuit& circuit;

    void operator()(const HadamardGate& g) const { check_target(g.target, circuit.n_qubits, "h"); }

    void operator()(const HadamardLayerGate& g) const {
        for (int t : g.targets) check_target(t, circuit.n_qubits, "hlayer");
        auto sorted = g.targets;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::invalid_argument("hlayer: repeated target");
        }
    }

    void operator()(const XorOracleGate& g) const {
        for (int t : g.in) check_target(t, circuit.n_qubits, "xor_oracle");
        for (int t : g.out) check_target(t, circuit.n_qubits, "xor_oracle");
        for (int a : g.in) {
            for (int b : g.out) {
                if (a == b) throw std::invalid_argument("xor_oracle: in/out registers overlap");
            }
        }
        if (g.table.size() != (std::size_t{1} << g.in.size())) {
            throw std::invalid_argument("xor_oracle: table size is not 2^|in|");
        }
        for (std::uint32_t v : g.table) {
            if (g.out.size() < 32 && v >= (std::uint32_t{1} << g.out.size())) {
                throw std::invalid_argument("xor_oracle: table value exceeds output register");
            }
        }
    }

    void operator()(const PhaseFlipGate& g) const {
        if (g.index >= circuit.dim()) throw std::invalid_argument("phase_flip: index out of range");
    }

    void operator()(const PermutationGate& g) const {
        if (g.table.size() != circuit.dim()) {
            throw std::invalid_argument("perm: table length is not 2^n_qubits");
        }
        std::vector<char> seen(g.table.size(), 0);
        for (std::uint64_t v : g.table) {
            if (v >= g.table.size() || seen[v]) {
                throw std::invalid_argument("perm: table is not a bijection");
            }
            seen[v] = 1;
        }
    }

    void operator()(const DenseUnitaryGate& g) const {
        if (g.targets.empty()) throw std::invalid_argument("u: no targets");
        for (int t : g.targets) check_target(t, circuit.n_qubits, "u");
        auto sorted = g.targets;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::invalid_argument("u: repeated target");
        }
        const std::size_t d = std::size_t{1} << g.targets.size();
        if (g.matrix.rows() != d || g.matrix.cols() != d) {
            throw std::invalid_argument("u: matrix is not 2^k x 2^k for k targets");
        }
        if (unitarity_error(g.matrix) > 1e-10) {
            throw std::invalid_argument("u: matrix is not unitary within 1e-10");
        }
    }
};

// Applies one gate to `data` seen as n_rows x n_cols (row index = basis index).
struct GateApplier {
    Complex* data;
    std::size_t n_rows;
    std::size_t n_cols;
    std::vector<Complex>& scratch;  // n_rows * n_cols, for permutations

    void operator()(const HadamardGate& g) const {
        kern::hadamard_rows(data, n_rows, n_cols, g.target);
    }

    void operator()(const HadamardLayerGate& g) const {
        for (int t : g.targets) kern::hadamard_rows(data, n_rows, n_cols, t);
    }

    void operator()(const XorOracleGate& g) const {
        const auto perm = xor_oracle_permutation(g, n_rows);
        apply_permutation(perm.data());
    }

    void operator()(const PhaseFlipGate& g) const {
        Complex* row = data + g.index * n_cols;
        for (std::size_t c = 0; c < n_cols; ++c) row[c] = -row[c];
    }

    void operator()(const PermutationGate& g) const { apply_permutation(g.table.data()); }

    void operator()(const DenseUnitaryGate& g) const {
        std::vector<int> targets = g.targets;
        CMatrix mat = g.matrix;
        if (!std::is_sorted(targets.begin(), targets.end())) {
            reorder_sorted(targets, mat);
        }
        kern::small_unitary_rows(data, n_rows, n_cols, targets.data(),
                                 static_cast<int>(targets.size()), mat.data());
    }

    void apply_permutation(const std::uint64_t* perm) const {
        if (scratch.size() < n_rows * n_cols) scratch.resize(n_rows * n_cols);
        kern::permute_rows(scratch.data(), data, n_rows, n_cols, perm);
        std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(n_rows * n_cols),
                  data);
    }

    // Permute matrix rows/cols so the target list is ascending (the kernel
    // wants canonical bit order).
    static void reorder_sorted(std::vector<int>& targets, CMatrix& mat) {
        const std::size_t k = targets.size();
        std::vector<std::size_t> order(k);
        for (std::size_t t = 0; t < k; ++t) order[t] = t;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return targets[a] < targets[b]; });
        const std::size_t d = std::size_t{1} << k;
        std::vector<std::size_t> remap(d);
        for (std::size_t b = 0; b < d; ++b) {
            std::size_t nb = 0;
            for (std::size_t t = 0; t < k; ++t) nb |= ((b >> order[t]) & 1) << t;
            remap[b] = nb;
        }
        CMatrix out(d, d);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) out(remap[r], remap[c]) = mat(r, c);
        }
        std::vector<int> sorted(k);
        for (std::size_t t = 0; t < k; ++t) sorted[t] = targets[order[t]];
        targets = sorted;
        mat = out;
    }
};

}  // namespace

void validate_circuit(const Circuit& circuit) {
    if (circuit.n_qubits <= 0 || circuit.n_qubits >= 63) {
        throw std::invalid_argument("circuit: n_qubits out of range");
    }
    for (const GateOp& gate : circuit.gates) std::visit(GateValidator{circuit}, gate);
}

static void apply_circuit_rows(const Circuit& circuit, Complex* data, std::size_t n_rows,
                               std::size_t n_cols) {
    std::vector<Complex> scratch;  // grown on first permutation-style gate
    GateApplier apply{data, n_rows, n_cols, scratch};
    for (const GateOp& gate : circuit.gates) std::visit(apply, gate);
}

void apply_circuit(const Circuit& circuit, std::vector<Complex>& psi) {
    if (psi.size() != circuit.dim()) throw std::invalid_argument("apply_circuit: dimension mismatch");
    apply_circuit_rows(circuit, psi.data(), psi.size(), 1);
}

std::vector<Complex> circuit_column(const Circuit& circuit, std::uint64_t index) {
    std::vector<Complex> psi(circuit.dim(), Complex{0.0, 0.0});
    psi.at(index) = Complex{1.0, 0.0};
    apply_circuit_rows(circuit, psi.data(), psi.size(), 1);
    return psi;
}

CMatrix circuit_unitary(const Circuit& circuit, std::size_t max_dim) {
    validate_circuit(circuit);
    const std::size_t n = circuit.dim();
    if (n > max_dim) {
        throw std::invalid_argument("circuit dimension " + std::to_string(n) +
                                    " exceeds the configured cap " + std::to_string(max_dim));
    }
    CMatrix u = CMatrix::identity(n);
    apply_circuit_rows(circuit, u.data(), n, n);
    return u;
}

DensityMatrix evolve(const DensityMatrix& rho, const CMatrix& u) {
    if (u.rows() != rho.dim() || u.cols() != rho.dim()) {
        throw std::invalid_argument("evolve: dimension mismatch");
    }
    DensityMatrix out;
    out.entries = matmul(matmul(u, rho.entries), adjoint(u));
    return out;
}

std::vector<double> born_distribution(const DensityMatrix& rho) {
    std::vector<double> probs = real_diagonal(rho.entries);
    double sum = 0.0;
    for (double& p : probs) {
        if (p < 0.0) {
            if (p < -1e-10) throw std::invalid_argument("born_distribution: diagonal entry below -1e-10");
            p = 0.0;
        }
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-10) {
        throw std::invalid_argument("born_distribution: diagonal sums to " + std::to_string(sum));
    }
    normalize_exact(probs);
    return probs;
}

std::vector<double> born_probs(const std::vector<Complex>& psi) {
    std::vector<double> probs(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) probs[i] = std::norm(psi[i]);
    return probs;
}

Circuit grover_circuit(int n_qubits, std::uint64_t marked, int iterations) {
    const std::size_t n = std::size_t{1} << n_qubits;
    if (marked >= n) throw std::invalid_argument("grover_circuit: marked index out of range");
    if (iterations < 0) throw std::invalid_argument("grover_circuit: negative iteration count");
    std::vector<int> all(n_qubits);
    for (int q = 0; q < n_qubits; ++q) all[q] = q;

    Circuit c;
    c.n_qubits = n_qubits;
    c.gates.emplace_back(HadamardLayerGate{all});
    for (int t = 0; t < iterations; ++t) {
        c.gates.emplace_back(PhaseFlipGate{marked});
        c.gates.emplace_back(HadamardLayerGate{all});
        c.gates.emplace_back(PhaseFlipGate{0});
        c.gates.emplace_back(HadamardLayerGate{all});
    }
    return c;
}

double grover_success_probability(std::size_t n_items, int iterations) {
    const double theta = std::asin(1.0 / std::sqrt(static_cast<double>(n_items)));
    const double s = std::sin((2.0 * iterations + 1.0) * theta);
    return s * s;
}

}  // namespace dqsim
