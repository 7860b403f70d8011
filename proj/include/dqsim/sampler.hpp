#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "dqsim/common.hpp"
#include "dqsim/dynamics.hpp"
#include "dqsim/rng.hpp"
#include "dqsim/state.hpp"

namespace dqsim {

struct CircuitSequence {
    int n_qubits = 0;
    std::vector<Circuit> circuits;

    std::size_t dim() const { return std::size_t{1} << n_qubits; }
    std::size_t steps() const { return circuits.size(); }
    bool operator==(const CircuitSequence&) const = default;
};

/// Throws unless T >= 1 and every circuit matches n_qubits.
void validate_sequence(const CircuitSequence& seq);

/// Classical trajectory (v_1, ..., v_T); v_0 = 0 is implicit because the
/// initial state is |0...0>.
struct History {
    std::vector<std::uint64_t> values;
};

struct HistoryBatch {
    std::vector<History> histories;
    std::uint64_t seed = 0;
    DynamicsKind model = DynamicsKind::SD;
    std::size_t dim = 0;
    /// empirical_marginals[k][v] = fraction of shots with v_{k+1} = v.
    std::vector<std::vector<double>> empirical_marginals;
};

struct SamplerOptions {
    DynamicsParams dynamics;
    int max_qubits = 12;
    /// Steps on spaces up to this dimension materialize the full transition
    /// matrix once (and share it across shots); larger steps resolve columns
    /// lazily per minimal block, which gives the same law without the N^2
    /// footprint.
    std::size_t dense_threshold = 256;
};

/// Per-step transition columns, shared read-only across shots. Column
/// construction is deterministic, so concurrent sampling stays reproducible.
class StepTransitions {
public:
    StepTransitions(const Circuit& circuit, std::vector<Complex> psi_before,
                    std::vector<Complex> psi_after, DynamicsKind kind,
                    const SamplerOptions& opts);

    std::uint64_t sample_next(std::uint64_t source, SplitMix64& rng) const;

    /// Destination distribution for one source (full length; test support).
    std::vector<double> column(std::uint64_t source) const;

    const std::vector<double>& dest_probs() const { return dest_probs_; }

private:
    enum class Mode { Dense, Product, Lazy };

    struct BlockData {
        std::vector<std::size_t> indices;          // global indices, ascending
        std::vector<double> columns;               // |L| x |L|, row i = column of local S
    };

    const BlockData& block_for(std::uint64_t source) const;  // caller holds mutex

    Circuit circuit_;
    DynamicsKind kind_;
    SamplerOptions opts_;
    std::vector<double> source_probs_, dest_probs_;
    Mode mode_;

    RMatrix dense_by_source_;            // row i = column i of S
    std::vector<double> product_column_;  // PD: one shared destination column

    bool point_source_ = false;
    std::uint64_t point_index_ = 0;
    std::vector<double> point_column_;

    mutable std::mutex mutex_;
    mutable std::unordered_map<std::uint64_t, std::size_t> block_slot_;
    mutable std::vector<std::unique_ptr<BlockData>> blocks_;
};

/// One trajectory: v_k sampled from column v_{k-1} of the step-k transition
/// matrix, state advanced by the step circuit.
History sample_history(const CircuitSequence& seq, DynamicsKind kind, SplitMix64& rng,
                       const SamplerOptions& opts = {});

/// `shots` independent trajectories; shot s draws from the stream derived
/// from (seed, s), so the batch is identical across runs and thread counts.
HistoryBatch sample_batch(const CircuitSequence& seq, DynamicsKind kind, std::size_t shots,
                          std::uint64_t seed, const SamplerOptions& opts = {});

/// Per-step total-variation distance between the batch marginals and the
/// Born distribution of the evolved state.
std::vector<double> marginal_deviation(const HistoryBatch& batch, const CircuitSequence& seq);

struct MarkovCheckResult {
    /// Worst |P(v_k | v_{k-1}, v_{k+1], v_{k-2}) - P(v_k | v_{k-1}, v_{k+1})|
    /// over cells with enough samples (the extra past conditioner must not
    /// move the estimate); at the chain end the future conditioner drops out.
    double max_conditional_gap = 0.0;
    /// TV between the empirical joint and the exact product of the per-step
    /// transition matrices over all dim^T histories.
    double joint_tv = 0.0;
    std::size_t cells_used = 0;
    std::size_t cells_skipped = 0;
};

/// Requires dim <= 8 and T <= 4 so the conditionals are estimable.
MarkovCheckResult markov_property_check(const CircuitSequence& seq, DynamicsKind kind,
                                        std::size_t shots, std::uint64_t seed,
                                        const SamplerOptions& opts = {});

}  // namespace dqsim
