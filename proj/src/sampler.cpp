#include "dqsim/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dqsim/kernels.hpp"

namespace dqsim {

void validate_sequence(const CircuitSequence& seq) {
    if (seq.circuits.empty()) throw std::invalid_argument("circuit sequence is empty (T >= 1)");
    if (seq.n_qubits <= 0) throw std::invalid_argument("circuit sequence: n_qubits must be positive");
    for (const Circuit& c : seq.circuits) {
        if (c.n_qubits != seq.n_qubits) {
            throw std::invalid_argument("circuit sequence: qubit count mismatch");
        }
        validate_circuit(c);
    }
}

namespace {

std::size_t sample_weights(SplitMix64& rng, const double* w, std::size_t n) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += w[i];
    const double u = rng.next_double() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i] <= 0.0) continue;
        last_positive = i;
        acc += w[i];
        if (u < acc) return i;
    }
    return last_positive;
}

// Destination probabilities with sub-threshold dust removed, normalized.
std::vector<double> clipped_distribution(const std::vector<double>& probs, double zero_tol) {
    std::vector<double> out = probs;
    for (double& p : out) {
        if (p <= zero_tol) p = 0.0;
    }
    normalize_exact(out);
    return out;
}

}  // namespace

StepTransitions::StepTransitions(const Circuit& circuit, std::vector<Complex> psi_before,
                                 std::vector<Complex> psi_after, DynamicsKind kind,
                                 const SamplerOptions& opts)
    : circuit_(circuit), kind_(kind), opts_(opts) {
    source_probs_ = born_probs(psi_before);
    dest_probs_ = born_probs(psi_after);
    const std::size_t n = source_probs_.size();

    if (n <= opts_.dense_threshold) {
        mode_ = Mode::Dense;
        const CMatrix u = circuit_unitary(circuit_, n);
        const TransitionMatrix s =
            transition(kind_, DensityMatrix::from_amplitudes(psi_before), u, opts_.dynamics);
        dense_by_source_ = RMatrix(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) dense_by_source_(i, j) = s.entries(j, i);
        }
        return;
    }
    if (kind_ == DynamicsKind::PD) {
        mode_ = Mode::Product;
        product_column_ = dest_probs_;
        normalize_exact(product_column_);
        return;
    }
    mode_ = Mode::Lazy;
    // A source distribution concentrated on one basis state forces the
    // scaling limit into a single column: the destination marginals
    // themselves. Both SD and DD reduce to that column, so no block or
    // iteration is needed for it.
    std::size_t support_count = 0, support_index = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (source_probs_[i] > opts_.dynamics.zero_tol) {
            ++support_count;
            support_index = i;
        }
    }
    if (support_count == 1) {
        point_source_ = true;
        point_index_ = support_index;
        point_column_ = clipped_distribution(dest_probs_, opts_.dynamics.zero_tol);
    }
}

const StepTransitions::BlockData& StepTransitions::block_for(std::uint64_t source) const {
    auto it = block_slot_.find(source);
    if (it != block_slot_.end()) return *blocks_[it->second];

    // Directed reachability over the circuit's support columns; for a unitary
    // step this closure is exactly the minimal block of `source`.
    const double zero_tol = opts_.dynamics.zero_tol;
    std::map<std::uint64_t, std::vector<Complex>> columns;
    std::vector<std::uint64_t> frontier{source};
    std::map<std::uint64_t, char> visited{{source, 1}};
    while (!frontier.empty()) {
        const std::uint64_t x = frontier.back();
        frontier.pop_back();
        auto col = circuit_column(circuit_, x);
        for (std::size_t j = 0; j < col.size(); ++j) {
            if (std::abs(col[j]) > zero_tol && !visited.count(j)) {
                visited.emplace(j, 1);
                frontier.push_back(j);
            }
        }
        columns.emplace(x, std::move(col));
    }

    auto block = std::make_unique<BlockData>();
    for (const auto& [idx, _] : visited) block->indices.push_back(idx);
    const std::size_t m = block->indices.size();

    std::vector<double> r_local(m), c_local(m);
    for (std::size_t a = 0; a < m; ++a) {
        r_local[a] = source_probs_[block->indices[a]];
        c_local[a] = dest_probs_[block->indices[a]];
    }

    if (kind_ == DynamicsKind::SD) {
        RMatrix u0(m, m);
        for (std::size_t b = 0; b < m; ++b) {
            const auto& col = columns.at(block->indices[b]);
            for (std::size_t a = 0; a < m; ++a) u0(a, b) = std::norm(col[block->indices[a]]);
        }
        ScalingOptions sopts;
        sopts.tol = opts_.dynamics.tol;
        sopts.max_iter = opts_.dynamics.max_iter;
        sopts.zero_target_tol = opts_.dynamics.zero_tol;
        const ScalingResult scaled = rc_scale(u0, MarginalTargets{r_local, c_local}, sopts);
        std::vector<std::size_t> whole(m);
        for (std::size_t a = 0; a < m; ++a) whole[a] = a;
        const RMatrix s_local = column_stochasticize(scaled.limit, r_local, {whole});
        block->columns.resize(m * m);
        for (std::size_t b = 0; b < m; ++b) {
            for (std::size_t a = 0; a < m; ++a) block->columns[b * m + a] = s_local(a, b);
        }
    } else {  // DD: product dynamics within the block
        double mass = 0.0;
        for (double v : c_local) mass += v;
        std::vector<double> dest(m);
        if (mass > opts_.dynamics.zero_tol) {
            dest = clipped_distribution(c_local, opts_.dynamics.zero_tol);
        } else {
            std::fill(dest.begin(), dest.end(), 1.0 / static_cast<double>(m));
        }
        block->columns.resize(m * m);
        for (std::size_t b = 0; b < m; ++b) {
            for (std::size_t a = 0; a < m; ++a) block->columns[b * m + a] = dest[a];
        }
    }

    blocks_.push_back(std::move(block));
    const std::size_t slot = blocks_.size() - 1;
    for (std::size_t idx : blocks_[slot]->indices) block_slot_.emplace(idx, slot);
    return *blocks_[slot];
}

std::uint64_t StepTransitions::sample_next(std::uint64_t source, SplitMix64& rng) const {
    switch (mode_) {
        case Mode::Dense: {
            const double* row = dense_by_source_.data() + source * dense_by_source_.cols();
            return sample_weights(rng, row, dense_by_source_.cols());
        }
        case Mode::Product:
            return sample_weights(rng, product_column_.data(), product_column_.size());
        case Mode::Lazy: {
            if (point_source_ && source == point_index_) {
                return sample_weights(rng, point_column_.data(), point_column_.size());
            }
            std::lock_guard<std::mutex> lock(mutex_);
            const BlockData& block = block_for(source);
            const std::size_t m = block.indices.size();
            const std::size_t local =
                static_cast<std::size_t>(std::lower_bound(block.indices.begin(),
                                                          block.indices.end(), source) -
                                         block.indices.begin());
            const std::size_t pick = sample_weights(rng, block.columns.data() + local * m, m);
            return block.indices[pick];
        }
    }
    throw std::logic_error("unreachable");
}

std::vector<double> StepTransitions::column(std::uint64_t source) const {
    const std::size_t n = source_probs_.size();
    std::vector<double> col(n, 0.0);
    switch (mode_) {
        case Mode::Dense:
            for (std::size_t j = 0; j < n; ++j) col[j] = dense_by_source_(source, j);
            return col;
        case Mode::Product:
            return product_column_;
        case Mode::Lazy: {
            if (point_source_ && source == point_index_) return point_column_;
            std::lock_guard<std::mutex> lock(mutex_);
            const BlockData& block = block_for(source);
            const std::size_t m = block.indices.size();
            const std::size_t local =
                static_cast<std::size_t>(std::lower_bound(block.indices.begin(),
                                                          block.indices.end(), source) -
                                         block.indices.begin());
            for (std::size_t a = 0; a < m; ++a) col[block.indices[a]] = block.columns[local * m + a];
            return col;
        }
    }
    throw std::logic_error("unreachable");
}

// ----------------------------------------------------------------- sampling

namespace {

struct PreparedSequence {
    std::vector<std::unique_ptr<StepTransitions>> steps;
};

PreparedSequence prepare(const CircuitSequence& seq, DynamicsKind kind,
                         const SamplerOptions& opts) {
    validate_sequence(seq);
    if (seq.n_qubits > opts.max_qubits) {
        throw std::invalid_argument("sequence needs " + std::to_string(seq.n_qubits) +
                                    " qubits, above the configured cap of " +
                                    std::to_string(opts.max_qubits));
    }
    PreparedSequence prep;
    std::vector<Complex> psi = PureState::zero(seq.n_qubits).amplitudes;
    for (const Circuit& circuit : seq.circuits) {
        std::vector<Complex> next = psi;
        apply_circuit(circuit, next);
        prep.steps.push_back(
            std::make_unique<StepTransitions>(circuit, psi, next, kind, opts));
        psi = std::move(next);
    }
    return prep;
}

History sample_one(const PreparedSequence& prep, SplitMix64& rng) {
    History h;
    h.values.reserve(prep.steps.size());
    std::uint64_t v = 0;  // deterministic v_0: the initial state is a basis state
    for (const auto& step : prep.steps) {
        v = step->sample_next(v, rng);
        h.values.push_back(v);
    }
    return h;
}

}  // namespace

History sample_history(const CircuitSequence& seq, DynamicsKind kind, SplitMix64& rng,
                       const SamplerOptions& opts) {
    const PreparedSequence prep = prepare(seq, kind, opts);
    return sample_one(prep, rng);
}

HistoryBatch sample_batch(const CircuitSequence& seq, DynamicsKind kind, std::size_t shots,
                          std::uint64_t seed, const SamplerOptions& opts) {
    if (shots < 1) throw std::invalid_argument("sample_batch: shots must be >= 1");
    const PreparedSequence prep = prepare(seq, kind, opts);

    HistoryBatch batch;
    batch.seed = seed;
    batch.model = kind;
    batch.dim = seq.dim();
    batch.histories.resize(shots);

    const bool parallel = kern::parallel_enabled();
#pragma omp parallel for schedule(static) if (parallel)
    for (std::size_t s = 0; s < shots; ++s) {
        SplitMix64 rng(derive_stream(seed, s));
        batch.histories[s] = sample_one(prep, rng);
    }

    const std::size_t t_steps = seq.steps();
    batch.empirical_marginals.assign(t_steps, std::vector<double>(batch.dim, 0.0));
    const double w = 1.0 / static_cast<double>(shots);
    for (const History& h : batch.histories) {
        for (std::size_t k = 0; k < t_steps; ++k) batch.empirical_marginals[k][h.values[k]] += w;
    }
    return batch;
}

std::vector<double> marginal_deviation(const HistoryBatch& batch, const CircuitSequence& seq) {
    validate_sequence(seq);
    if (batch.dim != seq.dim() || batch.empirical_marginals.size() != seq.steps()) {
        throw std::invalid_argument("marginal_deviation: batch does not match sequence");
    }
    std::vector<double> deviations;
    std::vector<Complex> psi = PureState::zero(seq.n_qubits).amplitudes;
    for (std::size_t k = 0; k < seq.steps(); ++k) {
        apply_circuit(seq.circuits[k], psi);
        std::vector<double> born = born_probs(psi);
        normalize_exact(born);
        deviations.push_back(total_variation(batch.empirical_marginals[k], born));
    }
    return deviations;
}

MarkovCheckResult markov_property_check(const CircuitSequence& seq, DynamicsKind kind,
                                        std::size_t shots, std::uint64_t seed,
                                        const SamplerOptions& opts) {
    validate_sequence(seq);
    const std::size_t n = seq.dim();
    const std::size_t t_steps = seq.steps();
    if (seq.steps() < 3) throw std::invalid_argument("markov_property_check: needs T >= 3");
    if (n > 8 || t_steps > 4) {
        throw std::invalid_argument("markov_property_check: limited to dim <= 8, T <= 4");
    }

    const HistoryBatch batch = sample_batch(seq, kind, shots, seed, opts);

    // Exact chain law from the dense per-step matrices.
    std::vector<RMatrix> step_matrices;
    std::vector<Complex> psi = PureState::zero(seq.n_qubits).amplitudes;
    for (const Circuit& circuit : seq.circuits) {
        const CMatrix u = circuit_unitary(circuit, n);
        const TransitionMatrix s =
            transition(kind, DensityMatrix::from_amplitudes(psi), u, opts.dynamics);
        step_matrices.push_back(s.entries);
        apply_circuit(circuit, psi);
    }

    std::size_t n_histories = 1;
    for (std::size_t k = 0; k < t_steps; ++k) n_histories *= n;

    std::vector<double> exact(n_histories, 0.0);
    for (std::size_t code = 0; code < n_histories; ++code) {
        double p = 1.0;
        std::size_t prev = 0, rest = code;
        for (std::size_t k = 0; k < t_steps; ++k) {
            const std::size_t v = rest % n;
            rest /= n;
            p *= step_matrices[k](v, prev);
            prev = v;
        }
        exact[code] = p;
    }
    std::vector<double> empirical(n_histories, 0.0);
    const double w = 1.0 / static_cast<double>(shots);
    for (const History& h : batch.histories) {
        std::size_t code = 0;
        for (std::size_t k = t_steps; k-- > 0;) code = code * n + h.values[k];
        empirical[code] += w;
    }

    MarkovCheckResult result;
    result.joint_tv = total_variation(exact, empirical);

    // Conditional probe: adding v_{k-2} to the (v_{k-1}, v_{k+1}) conditioner
    // must not move the estimate. Steps are 1-indexed here; k runs over
    // positions with a real v_{k-2}.
    constexpr std::size_t kMinCell = 100;
    for (std::size_t k = 3; k <= t_steps; ++k) {
        // cell key: (v_{k-2}, v_{k-1}, v_{k+1} or sentinel)
        std::map<std::vector<std::uint64_t>, std::map<std::uint64_t, std::size_t>> wide, narrow;
        for (const History& h : batch.histories) {
            const std::uint64_t past = h.values[k - 3];
            const std::uint64_t prev = h.values[k - 2];
            const std::uint64_t fut = (k < t_steps) ? h.values[k] : UINT64_MAX;
            const std::uint64_t here = h.values[k - 1];
            wide[{past, prev, fut}][here] += 1;
            narrow[{prev, fut}][here] += 1;
        }
        for (const auto& [key, hist] : wide) {
            std::size_t cell_total = 0;
            for (const auto& [_, cnt] : hist) cell_total += cnt;
            if (cell_total < kMinCell) {
                ++result.cells_skipped;
                continue;
            }
            const auto& base_hist = narrow.at({key[1], key[2]});
            std::size_t base_total = 0;
            for (const auto& [_, cnt] : base_hist) base_total += cnt;
            ++result.cells_used;
            for (std::uint64_t v = 0; v < n; ++v) {
                const auto wit = hist.find(v);
                const auto nit = base_hist.find(v);
                const double pw = wit == hist.end()
                                      ? 0.0
                                      : static_cast<double>(wit->second) / cell_total;
                const double pn = nit == base_hist.end()
                                      ? 0.0
                                      : static_cast<double>(nit->second) / base_total;
                result.max_conditional_gap = std::max(result.max_conditional_gap,
                                                      std::fabs(pw - pn));
            }
        }
    }
    return result;
}

}  // namespace dqsim
