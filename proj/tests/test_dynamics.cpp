#include <doctest.h>

#include <cmath>

#include "dqsim/dynamics.hpp"
#include "dqsim/random_instances.hpp"

using namespace dqsim;

namespace {

CMatrix hadamard2() {
    const double s = 1.0 / std::sqrt(2.0);
    CMatrix m(2, 2);
    m(0, 0) = s;
    m(0, 1) = s;
    m(1, 0) = s;
    m(1, 1) = -s;
    return m;
}

// Hadamard block on {0, 1}, identity on {2, 3}.
CMatrix hadamard_plus_identity() {
    const double s = 1.0 / std::sqrt(2.0);
    CMatrix m(4, 4);
    m(0, 0) = s;
    m(0, 1) = s;
    m(1, 0) = s;
    m(1, 1) = -s;
    m(2, 2) = 1.0;
    m(3, 3) = 1.0;
    return m;
}

DensityMatrix plus_state() {
    PureState psi;
    psi.n_qubits = 1;
    const double s = 1.0 / std::sqrt(2.0);
    psi.amplitudes = {Complex{s, 0.0}, Complex{s, 0.0}};
    return DensityMatrix::from_pure(psi);
}

DensityMatrix mix_of_blocks() {
    PureState psi;
    psi.n_qubits = 2;
    const double s = 1.0 / std::sqrt(2.0);
    psi.amplitudes = {Complex{s, 0.0}, Complex{0.0, 0.0}, Complex{s, 0.0}, Complex{0.0, 0.0}};
    return DensityMatrix::from_pure(psi);
}

}  // namespace

TEST_CASE("minimal_blocks: diagonal, tensor Hadamard, and dense supports") {
    CHECK(minimal_blocks(CMatrix::identity(4)) ==
          BlockPartition{{0}, {1}, {2}, {3}});

    // H on qubit 1 of two qubits mixes the high bit only: {0,2} and {1,3}.
    Circuit c;
    c.n_qubits = 2;
    c.gates.emplace_back(HadamardGate{1});
    CHECK(minimal_blocks(circuit_unitary(c)) == BlockPartition{{0, 2}, {1, 3}});

    SplitMix64 rng(301);
    CHECK(minimal_blocks(random_unitary(4, rng)) == BlockPartition{{0, 1, 2, 3}});
}

TEST_CASE("pd_transition: every column is the destination distribution") {
    const TransitionMatrix s = pd_transition(DensityMatrix::basis(2, 0), hadamard2());
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(s.entries(0, i) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(s.entries(1, i) == doctest::Approx(0.5).epsilon(1e-12));
    }

    SplitMix64 rng(303);
    const DensityMatrix rho = random_density(4, rng);
    const TransitionMatrix id = pd_transition(rho, CMatrix::identity(4));
    const auto diag = born_distribution(rho);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(id.entries(j, i) == doctest::Approx(diag[j]).epsilon(1e-12));
        }
    }
    CHECK(check_marginalization(id, rho, CMatrix::identity(4)) <= 1e-12);
}

TEST_CASE("dd_transition: identity and block-diagonal hand case") {
    SplitMix64 rng(307);
    const DensityMatrix rho = random_density(4, rng);
    CHECK(max_abs_diff(dd_transition(rho, CMatrix::identity(4)).entries,
                       RMatrix::identity(4)) <= 1e-12);

    // rho = |0><0|: the Hadamard block gets its product answer, the identity
    // singletons stay put even though they carry no mass.
    const TransitionMatrix s = dd_transition(DensityMatrix::basis(4, 0), hadamard_plus_identity());
    for (std::size_t i : {std::size_t{0}, std::size_t{1}}) {
        CHECK(s.entries(0, i) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(s.entries(1, i) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(s.entries(2, i) == 0.0);
        CHECK(s.entries(3, i) == 0.0);
    }
    CHECK(s.entries(2, 2) == 1.0);
    CHECK(s.entries(3, 3) == 1.0);
    CHECK(s.entries(2, 3) == 0.0);
}

TEST_CASE("sd_transition: the three canonical cases") {
    DynamicsParams params;

    // Two Hadamards compiled jointly: the identity permutation.
    {
        Circuit c;
        c.n_qubits = 1;
        c.gates.emplace_back(HadamardGate{0});
        c.gates.emplace_back(HadamardGate{0});
        const TransitionMatrix s =
            sd_transition(DensityMatrix::basis(2, 0), circuit_unitary(c), params);
        CHECK(max_abs_diff(s.entries, RMatrix::identity(2)) <= 1e-9);
    }
    // |0> through one Hadamard: a fair coin from source 0.
    {
        const TransitionMatrix s = sd_transition(DensityMatrix::basis(2, 0), hadamard2(), params);
        CHECK(s.entries(0, 0) == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(s.entries(1, 0) == doctest::Approx(0.5).epsilon(1e-9));
    }
    // |+> through a Hadamard lands on |0> with certainty: row 1 is dead.
    {
        const TransitionMatrix s = sd_transition(plus_state(), hadamard2(), params);
        CHECK(s.entries(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(s.entries(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(s.entries(1, 0) <= 1e-12);
        CHECK(s.entries(1, 1) <= 1e-12);
    }
}

TEST_CASE("transition matrices are column stochastic for all kinds") {
    SplitMix64 rng(311);
    for (int trial = 0; trial < 6; ++trial) {
        const Circuit c = random_circuit(2, 6, rng);
        const CMatrix u = circuit_unitary(c);
        const DensityMatrix rho = DensityMatrix::from_pure(random_pure_state(2, rng));
        for (DynamicsKind kind : {DynamicsKind::PD, DynamicsKind::DD, DynamicsKind::SD}) {
            const TransitionMatrix s = transition(kind, rho, u);
            validate_transition(s);
            const double bound = kind == DynamicsKind::SD ? 1e-8 : 1e-12;
            CHECK(check_marginalization(s, rho, u) <= bound);
        }
    }
}

TEST_CASE("check_marginalization flags a corrupted matrix") {
    SplitMix64 rng(313);
    const Circuit c = random_circuit(3, 8, rng);
    const CMatrix u = circuit_unitary(c);
    const DensityMatrix rho = DensityMatrix::from_pure(random_pure_state(3, rng));
    TransitionMatrix s = sd_transition(rho, u);
    CHECK(check_marginalization(s, rho, u) <= 1e-8);

    // Swap two columns with unequal sources: the residual must light up.
    for (std::size_t j = 0; j < s.dim(); ++j) std::swap(s.entries(j, 0), s.entries(j, 1));
    CHECK(check_marginalization(s, rho, u) > 1e-4);
}

TEST_CASE("check_symmetry: identity permutations and random relabelings") {
    SplitMix64 rng(317);
    const Circuit c = random_circuit(2, 6, rng);
    const CMatrix u = circuit_unitary(c);
    const DensityMatrix rho = DensityMatrix::from_pure(random_pure_state(2, rng));

    const std::vector<std::size_t> id{0, 1, 2, 3};
    CHECK(check_symmetry(DynamicsKind::SD, rho, u, id, id) == 0.0);

    for (int trial = 0; trial < 8; ++trial) {
        const auto p = random_permutation(4, rng);
        const auto q = random_permutation(4, rng);
        CHECK(check_symmetry(DynamicsKind::SD, rho, u, p, q) <= 1e-7);
        CHECK(check_symmetry(DynamicsKind::PD, rho, u, p, q) <= 1e-10);
        CHECK(check_symmetry(DynamicsKind::DD, rho, u, p, q) <= 1e-10);
    }
}

TEST_CASE("check_locality: block dynamics pass, product dynamics leaks") {
    const CMatrix u = hadamard_plus_identity();
    const DensityMatrix rho = mix_of_blocks();
    CHECK(check_locality(DynamicsKind::DD, rho, u) <= 1e-8);
    CHECK(check_locality(DynamicsKind::SD, rho, u) <= 1e-8);
    CHECK(check_locality(DynamicsKind::PD, rho, u) > 0.1);

    // A single dense block is vacuous cross-block and self-identical within.
    SplitMix64 rng(331);
    const CMatrix dense = random_unitary(4, rng);
    const DensityMatrix rho4 = random_density(4, rng);
    CHECK(check_locality(DynamicsKind::SD, rho4, dense) == 0.0);
}

TEST_CASE("check_robustness_probe: zero delta, stable scaling, fragile blocks") {
    SplitMix64 rng(337);
    const Circuit c = random_circuit(2, 6, rng);
    const CMatrix u = circuit_unitary(c);
    const DensityMatrix rho = DensityMatrix::from_pure(random_pure_state(2, rng));

    SplitMix64 probe1(1);
    CHECK(check_robustness_probe(DynamicsKind::SD, rho, u, 0.0, 5, probe1) == 0.0);

    SplitMix64 probe2(2);
    CHECK(check_robustness_probe(DynamicsKind::SD, rho, u, 1e-6, 10, probe2) <= 1e-3);

    // A 1e-6 bridge across a block boundary moves the block dynamics by O(1).
    SplitMix64 probe3(3);
    CHECK(check_robustness_probe(DynamicsKind::DD, mix_of_blocks(), hadamard_plus_identity(),
                                 1e-6, 20, probe3) >= 0.1);
}

TEST_CASE("check_commutativity: product states commute, entangled ones do not") {
    SplitMix64 rng(347);
    const CMatrix ua = random_unitary(2, rng);
    const CMatrix ub = random_unitary(2, rng);

    const PureState a = random_pure_state(1, rng);
    const PureState b = random_pure_state(1, rng);
    PureState prod;
    prod.n_qubits = 2;
    prod.amplitudes.resize(4);
    for (std::size_t ib = 0; ib < 2; ++ib) {
        for (std::size_t ia = 0; ia < 2; ++ia) {
            prod.amplitudes[ib * 2 + ia] = a.amplitudes[ia] * b.amplitudes[ib];
        }
    }
    CHECK(check_commutativity(DynamicsKind::SD, DensityMatrix::from_pure(prod), ua, ub) <= 1e-7);

    PureState bell;
    bell.n_qubits = 2;
    const double s = 1.0 / std::sqrt(2.0);
    bell.amplitudes = {Complex{s, 0.0}, Complex{0.0, 0.0}, Complex{0.0, 0.0}, Complex{s, 0.0}};
    const double dev =
        check_commutativity(DynamicsKind::SD, DensityMatrix::from_pure(bell), ua, ub);
    MESSAGE("entangled commutativity deviation: ", dev);
    CHECK(dev > 1e-3);

    CHECK(check_commutativity(DynamicsKind::SD, DensityMatrix::from_pure(bell),
                              CMatrix::identity(2), CMatrix::identity(2)) == 0.0);

    CHECK_THROWS_AS(check_commutativity(DynamicsKind::SD, DensityMatrix::basis(4, 0),
                                        CMatrix::identity(2), CMatrix::identity(4)),
                    std::invalid_argument);
}

TEST_CASE("block dynamics comparison on block-diagonal circuits (reported)") {
    // The scaling dynamics need not equal the block-product dynamics; the gap
    // is recorded, not asserted.
    const CMatrix u = hadamard_plus_identity();
    const DensityMatrix rho = mix_of_blocks();
    const double gap = max_abs_diff(sd_transition(rho, u).entries,
                                    dd_transition(rho, u).entries);
    MESSAGE("sd vs dd on block-diagonal instance: max entry gap ", gap);
    CHECK(gap >= 0.0);
}
