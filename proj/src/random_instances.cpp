#include "dqsim/random_instances.hpp"

#include <cmath>
#include <numeric>

namespace dqsim {

CMatrix random_unitary(std::size_t dim, SplitMix64& rng) {
    CMatrix m(dim, dim);
    for (std::size_t i = 0; i < dim * dim; ++i) {
        m.data()[i] = Complex{rng.next_gaussian(), rng.next_gaussian()};
    }
    // Modified Gram-Schmidt over columns, run twice for orthogonality at
    // working precision.
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t c = 0; c < dim; ++c) {
            for (std::size_t prev = 0; prev < c; ++prev) {
                Complex dot{0.0, 0.0};
                for (std::size_t r = 0; r < dim; ++r) dot += std::conj(m(r, prev)) * m(r, c);
                for (std::size_t r = 0; r < dim; ++r) m(r, c) -= dot * m(r, prev);
            }
            double norm = 0.0;
            for (std::size_t r = 0; r < dim; ++r) norm += std::norm(m(r, c));
            norm = std::sqrt(norm);
            for (std::size_t r = 0; r < dim; ++r) m(r, c) /= norm;
        }
    }
    return m;
}

PureState random_pure_state(int n_qubits, SplitMix64& rng) {
    PureState psi;
    psi.n_qubits = n_qubits;
    psi.amplitudes.resize(std::size_t{1} << n_qubits);
    double norm = 0.0;
    for (Complex& a : psi.amplitudes) {
        a = Complex{rng.next_gaussian(), rng.next_gaussian()};
        norm += std::norm(a);
    }
    norm = std::sqrt(norm);
    for (Complex& a : psi.amplitudes) a /= norm;
    return psi;
}

DensityMatrix random_density(std::size_t dim, SplitMix64& rng) {
    // Mixture of a few random pure states.
    std::vector<double> weights(3);
    double total = 0.0;
    for (double& w : weights) {
        w = rng.next_double() + 0.1;
        total += w;
    }
    DensityMatrix rho;
    rho.entries = CMatrix(dim, dim);
    for (double w : weights) {
        std::vector<Complex> psi(dim);
        double norm = 0.0;
        for (Complex& a : psi) {
            a = Complex{rng.next_gaussian(), rng.next_gaussian()};
            norm += std::norm(a);
        }
        norm = std::sqrt(norm);
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c < dim; ++c) {
                rho.entries(r, c) += (w / total) * psi[r] * std::conj(psi[c]) / (norm * norm);
            }
        }
    }
    // Symmetrize away the rounding skew so the result validates cleanly.
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = r; c < dim; ++c) {
            const Complex avg = 0.5 * (rho.entries(r, c) + std::conj(rho.entries(c, r)));
            rho.entries(r, c) = avg;
            rho.entries(c, r) = std::conj(avg);
        }
        rho.entries(r, r) = Complex{rho.entries(r, r).real(), 0.0};
    }
    const double tr = trace_real(rho.entries);
    for (std::size_t i = 0; i < dim * dim; ++i) rho.entries.data()[i] /= tr;
    return rho;
}

std::vector<std::size_t> random_permutation(std::size_t n, SplitMix64& rng) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        std::swap(perm[i - 1], perm[rng.next_below(i)]);
    }
    return perm;
}

Circuit random_circuit(int n_qubits, int n_gates, SplitMix64& rng) {
    Circuit c;
    c.n_qubits = n_qubits;
    const std::size_t dim = c.dim();
    for (int g = 0; g < n_gates; ++g) {
        const std::uint64_t pick = rng.next_below(n_qubits >= 2 ? 5 : 3);
        switch (pick) {
            case 0:
                c.gates.emplace_back(HadamardGate{static_cast<int>(rng.next_below(n_qubits))});
                break;
            case 1:
                c.gates.emplace_back(DenseUnitaryGate{
                    {static_cast<int>(rng.next_below(n_qubits))}, random_unitary(2, rng)});
                break;
            case 2:
                c.gates.emplace_back(PhaseFlipGate{rng.next_below(dim)});
                break;
            case 3: {
                const int a = static_cast<int>(rng.next_below(n_qubits));
                int b = static_cast<int>(rng.next_below(n_qubits - 1));
                if (b >= a) ++b;
                c.gates.emplace_back(DenseUnitaryGate{{a, b}, random_unitary(4, rng)});
                break;
            }
            default: {
                const int a = static_cast<int>(rng.next_below(n_qubits));
                int b = static_cast<int>(rng.next_below(n_qubits - 1));
                if (b >= a) ++b;
                // controlled-not as an xor oracle
                c.gates.emplace_back(XorOracleGate{{0u, 1u}, {a}, {b}});
                break;
            }
        }
    }
    return c;
}

}  // namespace dqsim
