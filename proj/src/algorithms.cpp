#include "dqsim/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace dqsim {

void validate_pair(const DistributionPair& pair) {
    if (pair.n <= 0 || pair.n > 16) throw std::invalid_argument("distribution pair: n out of range");
    const std::size_t domain = std::size_t{1} << pair.n;
    const std::uint32_t out_bound = std::uint32_t{1} << (pair.n + 1);
    if (pair.table0.size() != domain || pair.table1.size() != domain) {
        throw std::invalid_argument("distribution pair: table length is not 2^n");
    }
    for (std::uint32_t y : pair.table0) {
        if (y >= out_bound) throw std::invalid_argument("distribution pair: output out of range");
    }
    for (std::uint32_t y : pair.table1) {
        if (y >= out_bound) throw std::invalid_argument("distribution pair: output out of range");
    }
    if (pair.epsilon < 0.0 || pair.epsilon >= 0.5) {
        throw std::invalid_argument("distribution pair: epsilon must be in [0, 1/2)");
    }
}

bool is_injective(const std::vector<std::uint32_t>& table) {
    std::vector<std::uint32_t> sorted = table;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

double statistical_difference(const DistributionPair& pair) {
    validate_pair(pair);
    const std::size_t domain = pair.table0.size();
    const std::size_t out_space = std::size_t{1} << (pair.n + 1);
    std::vector<double> p0(out_space, 0.0), p1(out_space, 0.0);
    const double w = 1.0 / static_cast<double>(domain);
    for (std::uint32_t y : pair.table0) p0[y] += w;
    for (std::uint32_t y : pair.table1) p1[y] += w;
    return total_variation(p0, p1);
}

HashFunction random_hash(int domain_bits, std::uint32_t range, SplitMix64& rng) {
    if (range < 1) throw std::invalid_argument("random_hash: range must be >= 1");
    HashFunction h;
    h.range = range;
    h.table.resize(std::size_t{1} << domain_bits);
    for (std::uint32_t& v : h.table) {
        v = 1 + static_cast<std::uint32_t>(rng.next_below(range));
    }
    return h;
}

CircuitSequence build_collision_sequence(const DistributionPair& pair,
                                         const std::optional<HashFunction>& hash, int rounds) {
    validate_pair(pair);
    if (rounds < 1) throw std::invalid_argument("build_collision_sequence: rounds must be >= 1");
    const int n = pair.n;
    int hash_bits = 0;
    if (hash && hash->range > 1) {
        while ((std::uint32_t{1} << hash_bits) < hash->range) ++hash_bits;
    }
    const int total_qubits = 1 + n + (n + 1) + hash_bits;

    std::vector<int> control_and_input(n + 1);
    std::iota(control_and_input.begin(), control_and_input.end(), 0);
    std::vector<int> output_reg(n + 1);
    std::iota(output_reg.begin(), output_reg.end(), n + 1);
    std::vector<int> hash_reg(hash_bits);
    std::iota(hash_reg.begin(), hash_reg.end(), 2 * n + 2);

    // Oracle input z encodes (control, X) with the control in bit 0.
    std::vector<std::uint32_t> y_table(std::size_t{1} << (n + 1));
    for (std::size_t z = 0; z < y_table.size(); ++z) {
        const std::size_t x = z >> 1;
        y_table[z] = (z & 1) ? pair.table1[x] : pair.table0[x];
    }

    Circuit prepare;
    prepare.n_qubits = total_qubits;
    prepare.gates.emplace_back(HadamardLayerGate{control_and_input});
    prepare.gates.emplace_back(XorOracleGate{y_table, control_and_input, output_reg});
    if (hash && hash->range > 1) {
        std::vector<std::uint32_t> h_table(hash->table.size());
        for (std::size_t z = 0; z < h_table.size(); ++z) h_table[z] = hash->table[z] - 1;
        prepare.gates.emplace_back(XorOracleGate{h_table, control_and_input, hash_reg});
    }

    Circuit fourier;
    fourier.n_qubits = total_qubits;
    fourier.gates.emplace_back(HadamardLayerGate{control_and_input});

    CircuitSequence seq;
    seq.n_qubits = total_qubits;
    seq.circuits.push_back(std::move(prepare));
    for (int r = 0; r < rounds; ++r) {
        seq.circuits.push_back(fourier);
        seq.circuits.push_back(fourier);
    }
    return seq;
}

namespace {

bool control_bit_flip(const History& h) {
    // Values after step 1 and step 3; only the control bit is compared.
    return ((h.values[0] ^ h.values[2]) & 1ULL) != 0;
}

}  // namespace

CollisionVerdict collision_decide(const DistributionPair& pair, DynamicsKind kind,
                                  const CollisionOptions& opts) {
    validate_pair(pair);
    CollisionVerdict verdict;

    if (is_injective(pair.table0) && is_injective(pair.table1)) {
        const CircuitSequence seq = build_collision_sequence(pair, std::nullopt, 1);
        const HistoryBatch batch = sample_batch(seq, kind, opts.repetitions, opts.seed, opts.sampler);
        verdict.rounds_used = static_cast<long>(opts.repetitions);
        for (std::size_t rep = 0; rep < batch.histories.size(); ++rep) {
            const History& h = batch.histories[rep];
            if (control_bit_flip(h)) {
                verdict.flip_evidence.push_back({rep, -1, h.values[0], h.values[2]});
            }
        }
        verdict.verdict = verdict.flip_evidence.empty() ? CollisionCall::Far : CollisionCall::Close;
        return verdict;
    }

    // General route: per repetition, a doubling hash schedule with a fresh
    // hash and a fresh three-step history per round.
    const std::uint64_t hash_master = derive_stream(opts.seed, 0x68617368ULL);
    const std::uint64_t sample_master = derive_stream(opts.seed, 0x73616d70ULL);
    const int n = pair.n;
    for (std::size_t rep = 0; rep < opts.repetitions; ++rep) {
        for (int round = 0; round <= n; ++round) {
            const std::uint64_t stream = rep * static_cast<std::uint64_t>(n + 1) + round;
            SplitMix64 hash_rng(derive_stream(hash_master, stream));
            const HashFunction h = random_hash(n + 1, std::uint32_t{1} << round, hash_rng);
            const CircuitSequence seq = build_collision_sequence(pair, h, 1);
            SplitMix64 sample_rng(derive_stream(sample_master, stream));
            const History history = sample_history(seq, kind, sample_rng, opts.sampler);
            ++verdict.rounds_used;
            if (control_bit_flip(history)) {
                verdict.flip_evidence.push_back({rep, round, history.values[0], history.values[2]});
                if (opts.early_exit) break;
            }
        }
    }
    verdict.verdict = verdict.flip_evidence.empty() ? CollisionCall::Far : CollisionCall::Close;
    return verdict;
}

double event_e_probability(long n0, long n1, long k_range) {
    if (n0 < 1 || n1 < 1 || k_range < 1) {
        throw std::invalid_argument("event_e_probability: n0, n1, K must be >= 1");
    }
    const double k = static_cast<double>(k_range);
    return std::pow(1.0 - 1.0 / k, static_cast<double>(n0 + n1)) * (static_cast<double>(n1) / k);
}

// ------------------------------------------------------------------- search

SearchPlan build_search_sequence(int n_work_qubits, std::uint64_t marked, int grover_iters,
                                 int juggle_rounds, std::uint64_t seed, int hash_bits) {
    if (n_work_qubits < 1) throw std::invalid_argument("build_search_sequence: need >= 1 qubit");
    const std::size_t n_items = std::size_t{1} << n_work_qubits;
    if (marked >= n_items) throw std::invalid_argument("build_search_sequence: marked out of range");
    if (grover_iters < 0 || juggle_rounds < 0) {
        throw std::invalid_argument("build_search_sequence: negative round count");
    }
    if (hash_bits < 0) hash_bits = std::max(1, (n_work_qubits + 2) / 3);

    SearchPlan plan;
    plan.n_work = n_work_qubits;
    plan.marked = marked;
    plan.grover_iters = grover_iters;
    plan.juggle_rounds = juggle_rounds;

    const int total_qubits = juggle_rounds > 0 ? n_work_qubits + hash_bits : n_work_qubits;
    std::vector<int> work(n_work_qubits);
    std::iota(work.begin(), work.end(), 0);
    std::vector<int> ancilla(total_qubits - n_work_qubits);
    std::iota(ancilla.begin(), ancilla.end(), n_work_qubits);

    Circuit grover;
    grover.n_qubits = total_qubits;
    grover.gates.emplace_back(HadamardLayerGate{work});
    for (int t = 0; t < grover_iters; ++t) {
        grover.gates.emplace_back(PhaseFlipGate{marked});
        grover.gates.emplace_back(HadamardLayerGate{work});
        grover.gates.emplace_back(PhaseFlipGate{0});
        grover.gates.emplace_back(HadamardLayerGate{work});
    }

    CircuitSequence seq;
    seq.n_qubits = total_qubits;
    seq.circuits.push_back(std::move(grover));

    for (int round = 0; round < juggle_rounds; ++round) {
        SplitMix64 rng(derive_stream(seed, static_cast<std::uint64_t>(round)));
        std::vector<std::uint32_t> h_table(n_items);
        for (std::uint32_t& v : h_table) {
            v = static_cast<std::uint32_t>(rng.next_below(std::uint64_t{1} << hash_bits));
        }
        Circuit hash_in;
        hash_in.n_qubits = total_qubits;
        hash_in.gates.emplace_back(XorOracleGate{h_table, work, ancilla});
        Circuit fourier;
        fourier.n_qubits = total_qubits;
        fourier.gates.emplace_back(HadamardLayerGate{work});

        seq.circuits.push_back(hash_in);         // bucket the work register
        seq.circuits.push_back(fourier);         // juggle
        seq.circuits.push_back(fourier);         // and back
        seq.circuits.push_back(std::move(hash_in));  // uncompute the bucket
    }
    plan.seq = std::move(seq);
    return plan;
}

SearchOutcome search_decide(const SearchPlan& plan, DynamicsKind kind, std::size_t shots,
                            std::uint64_t seed, const SamplerOptions& opts) {
    const HistoryBatch batch = sample_batch(plan.seq, kind, shots, seed, opts);
    const std::uint64_t work_mask = (std::uint64_t{1} << plan.n_work) - 1;

    SearchOutcome outcome;
    outcome.shots = shots;
    outcome.queries = plan.grover_iters;
    outcome.results.reserve(shots);
    std::size_t successes = 0;
    for (const History& h : batch.histories) {
        SearchShot shot;
        shot.queries_used = plan.grover_iters;
        shot.history = h;
        for (std::uint64_t v : h.values) {
            if ((v & work_mask) == plan.marked) {
                shot.found = plan.marked;
                break;
            }
        }
        if (shot.found) ++successes;
        outcome.results.push_back(std::move(shot));
    }
    outcome.success_fraction = static_cast<double>(successes) / static_cast<double>(shots);
    return outcome;
}

std::vector<ScalingBenchRow> search_scaling_bench(const std::vector<std::size_t>& n_items_list,
                                                  DynamicsKind kind, std::size_t shots,
                                                  std::uint64_t seed, double budget_scale,
                                                  int juggle_rounds, const SamplerOptions& opts) {
    std::vector<ScalingBenchRow> rows;
    for (std::size_t n_items : n_items_list) {
        int n_work = 0;
        while ((std::size_t{1} << n_work) < n_items) ++n_work;
        if ((std::size_t{1} << n_work) != n_items) {
            throw std::invalid_argument("search_scaling_bench: N must be a power of two");
        }
        const int full_budget = static_cast<int>(
            std::ceil(budget_scale * std::cbrt(static_cast<double>(n_items))));
        const std::uint64_t marked = derive_stream(seed, n_items) % n_items;
        for (int budget : {full_budget, full_budget / 2}) {
            const SearchPlan plan = build_search_sequence(n_work, marked, budget, juggle_rounds,
                                                          derive_stream(seed, 0xA5), -1);
            const SearchOutcome outcome =
                search_decide(plan, kind, shots, derive_stream(seed, 0x5A + budget), opts);
            ScalingBenchRow row;
            row.n_items = n_items;
            row.queries = budget;
            row.juggle_rounds = juggle_rounds;
            row.shots = shots;
            row.success = outcome.success_fraction;
            row.std_err = std::sqrt(outcome.success_fraction * (1.0 - outcome.success_fraction) /
                                    static_cast<double>(shots));
            rows.push_back(row);
        }
    }
    return rows;
}

// --------------------------------------------------------------- generators

DistributionPair make_identical_pair(int n) {
    DistributionPair pair;
    pair.n = n;
    pair.epsilon = 0.0;
    pair.table0.resize(std::size_t{1} << n);
    std::iota(pair.table0.begin(), pair.table0.end(), std::uint32_t{0});
    pair.table1 = pair.table0;
    return pair;
}

DistributionPair make_disjoint_pair(int n) {
    DistributionPair pair;
    pair.n = n;
    pair.epsilon = 0.0;
    const std::size_t domain = std::size_t{1} << n;
    pair.table0.resize(domain);
    pair.table1.resize(domain);
    for (std::size_t x = 0; x < domain; ++x) {
        pair.table0[x] = static_cast<std::uint32_t>(x);
        pair.table1[x] = static_cast<std::uint32_t>(x + domain);
    }
    return pair;
}

DistributionPair make_two_to_one_pair(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("make_two_to_one_pair: n must be >= 1");
    DistributionPair pair;
    pair.n = n;
    pair.epsilon = 0.0;
    const std::size_t domain = std::size_t{1} << n;

    // Random pairing of the domain, random distinct outputs per pair.
    SplitMix64 rng(derive_stream(seed, 0x2121));
    std::vector<std::uint32_t> inputs(domain);
    std::iota(inputs.begin(), inputs.end(), std::uint32_t{0});
    for (std::size_t i = domain; i > 1; --i) {
        std::swap(inputs[i - 1], inputs[rng.next_below(i)]);
    }
    std::vector<std::uint32_t> outputs(std::size_t{1} << (n + 1));
    std::iota(outputs.begin(), outputs.end(), std::uint32_t{0});
    for (std::size_t i = outputs.size(); i > 1; --i) {
        std::swap(outputs[i - 1], outputs[rng.next_below(i)]);
    }

    pair.table0.resize(domain);
    for (std::size_t p = 0; p < domain / 2; ++p) {
        pair.table0[inputs[2 * p]] = outputs[p];
        pair.table0[inputs[2 * p + 1]] = outputs[p];
    }
    pair.table1 = pair.table0;
    return pair;
}

}  // namespace dqsim
