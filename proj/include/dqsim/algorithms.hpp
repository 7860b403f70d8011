#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dqsim/common.hpp"
#include "dqsim/rng.hpp"
#include "dqsim/sampler.hpp"

namespace dqsim {

// ---------------------------------------------------------------- collision

/// Two lookup tables {0,1}^n -> {0,1}^(n+1) inducing output distributions
/// under a uniform input, promised either epsilon-close or epsilon-far in
/// total variation.
struct DistributionPair {
    int n = 0;
    std::vector<std::uint32_t> table0;
    std::vector<std::uint32_t> table1;
    double epsilon = 0.0;
};

void validate_pair(const DistributionPair& pair);
bool is_injective(const std::vector<std::uint32_t>& table);

/// Exact total-variation distance of the two induced output distributions.
double statistical_difference(const DistributionPair& pair);

/// Uniform lookup-table hash {0,1}^domain_bits -> {1, ..., range}.
struct HashFunction {
    std::vector<std::uint32_t> table;  // values in [1, range]
    std::uint32_t range = 1;
};

HashFunction random_hash(int domain_bits, std::uint32_t range, SplitMix64& rng);

/// Registers: qubit 0 = control bit, then n input bits, then n+1 output
/// bits, then ceil(log2 range) hash bits (absent for range 1 or no hash).
/// The first circuit prepares the superposed evaluation of both tables (and
/// the hash of control+input, when given); each round then applies the
/// bitwise Fourier layer to the control+input bits twice, restoring the
/// state. The output and hash registers are never touched after step one.
CircuitSequence build_collision_sequence(const DistributionPair& pair,
                                         const std::optional<HashFunction>& hash, int rounds);

enum class CollisionCall { Close, Far };

struct FlipEvent {
    std::size_t repetition;
    int round;                 // hash-range exponent (range = 2^round), -1 without hash
    std::uint64_t v_first, v_last;
};

/// Close iff flip_evidence is nonempty.
struct CollisionVerdict {
    CollisionCall verdict = CollisionCall::Far;
    long rounds_used = 0;  // three-step histories sampled
    std::vector<FlipEvent> flip_evidence;
};

struct CollisionOptions {
    std::size_t repetitions = 50;
    std::uint64_t seed = 0;
    SamplerOptions sampler;
    /// A repetition's round schedule stops at its first flip; later rounds
    /// cannot change the verdict.
    bool early_exit = true;
};

/// Injective tables take the plain three-circuit route; otherwise each
/// repetition walks the doubling hash schedule (range 2^0, ..., 2^n with a
/// fresh hash per round, one three-step history each) and looks for a
/// control-bit flip between the first and third value. Ancilla bits are
/// masked out of the comparison. Behavior on promise-violating inputs is
/// unspecified, matching the promise-problem contract.
CollisionVerdict collision_decide(const DistributionPair& pair, DynamicsKind kind,
                                  const CollisionOptions& opts);

/// (1 - 1/K)^(n0+n1) * n1 / K: probability that a sampled value keeps exactly
/// one hash-colliding counterpart and no same-side collision. This tracks the
/// exact uniform-hash probability up to two factors of (1 - 1/K).
double event_e_probability(long n0, long n1, long k_range);

// ------------------------------------------------------------------- search

/// A built search experiment: the circuit list plus the metadata needed to
/// score histories.
struct SearchPlan {
    CircuitSequence seq;
    int n_work = 0;  // searched space is 2^n_work items, the low qubits
    std::uint64_t marked = 0;
    int grover_iters = 0;  // oracle queries consumed by the opening circuit
    int juggle_rounds = 0;
};

/// One amplitude-boosting circuit (grover_iters oracle calls) followed by
/// juggle_rounds of hash + Fourier-layer + inverse + unhash on the work
/// register. Juggling never queries the marked-item oracle. hash_bits < 0
/// picks ~n/3 bits, putting the hash range near (2^n)^(1/3).
SearchPlan build_search_sequence(int n_work_qubits, std::uint64_t marked, int grover_iters,
                                 int juggle_rounds, std::uint64_t seed, int hash_bits = -1);

struct SearchShot {
    std::optional<std::uint64_t> found;  // the marked index, when it was visited
    long queries_used = 0;
    History history;
};

struct SearchOutcome {
    double success_fraction = 0.0;
    std::size_t shots = 0;
    long queries = 0;
    std::vector<SearchShot> results;
};

/// A shot succeeds when the marked value shows up in the work bits anywhere
/// along its history.
SearchOutcome search_decide(const SearchPlan& plan, DynamicsKind kind, std::size_t shots,
                            std::uint64_t seed, const SamplerOptions& opts = {});

struct ScalingBenchRow {
    std::size_t n_items = 0;
    long queries = 0;
    int juggle_rounds = 0;
    std::size_t shots = 0;
    double success = 0.0;
    double std_err = 0.0;
};

/// For each N: success at budget ceil(c * N^(1/3)) and at half that budget.
std::vector<ScalingBenchRow> search_scaling_bench(const std::vector<std::size_t>& n_items_list,
                                                  DynamicsKind kind, std::size_t shots,
                                                  std::uint64_t seed, double budget_scale = 1.0,
                                                  int juggle_rounds = 8,
                                                  const SamplerOptions& opts = {});

// --------------------------------------------------------------- generators

DistributionPair make_identical_pair(int n);
DistributionPair make_disjoint_pair(int n);
/// Both tables equal and exactly two-to-one, with randomized pairing.
DistributionPair make_two_to_one_pair(int n, std::uint64_t seed);

}  // namespace dqsim
