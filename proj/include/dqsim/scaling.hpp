#pragma once

#include <optional>
#include <vector>

#include "dqsim/common.hpp"
#include "dqsim/matrix.hpp"

namespace dqsim {

/// Prescribed marginals for the scaling iteration: col_targets[i] is the
/// required sum of column i (mass leaving source i), row_targets[j] the
/// required sum of row j (mass arriving at destination j).
struct MarginalTargets {
    std::vector<double> col_targets;
    std::vector<double> row_targets;
};

/// Throws unless both vectors are nonnegative and sum to 1 within 1e-10.
void validate_targets(const MarginalTargets& targets);

struct ScalingOptions {
    double tol = 1e-10;         // max-norm marginal residual to reach
    long max_iter = 100000;     // sweep budget (one sweep = column step + row step)
    bool check_flow = false;    // run the feasibility pre-check
    double zero_target_tol = 1e-12;  // targets at or below this are treated as exact zeros
};

/// Limit of the alternating normalization together with the accumulated
/// diagonal factors: limit(j, i) = row_factors[j] * M(j, i) * col_factors[i]
/// on the support. Zero-target rows/columns carry factor 0.
struct ScalingResult {
    RMatrix limit;
    std::vector<double> col_factors;
    std::vector<double> row_factors;
    long iterations = 0;   // column steps performed
    double residual = 0.0; // row-marginal deviation after the closing column step
};

/// Entrywise |u(j,i)|^2. For unitary input the result is doubly stochastic.
RMatrix squared_magnitudes(const CMatrix& u);

/// Alternating column/row normalization of a nonnegative matrix to the
/// prescribed marginals, column step first. Columns end exact; rows carry
/// the reported residual. Throws NonConvergenceError when the sweep budget
/// runs out and InfeasibleTargetsError when the requested flow pre-check
/// fails. Callers scaling a unitary's squared magnitudes may skip the check:
/// feasibility always holds there.
ScalingResult rc_scale(const RMatrix& m, const MarginalTargets& targets,
                       const ScalingOptions& opts = {});

struct FlowCheckResult {
    bool feasible = false;
    std::optional<RMatrix> witness;  // nonnegative matrix meeting support + marginals
};

/// Max-flow feasibility of the transportation problem: does a nonnegative
/// matrix with the given support, column sums col_targets, and row sums
/// row_targets exist? support(j, i) > 0 marks an allowed (source i -> dest j)
/// entry. Flows are compared with 1e-9 slack.
FlowCheckResult flow_condition_check(const RMatrix& support, const MarginalTargets& targets);

/// Per-column normalization of a scaling limit into a column-stochastic
/// matrix. Columns whose source mass is at or below 1e-12 are unreachable in
/// sampling; they get the achieved destination marginal restricted to the
/// column's block (uniform over the block when that marginal carries no
/// mass), which keeps every column stochastic and block-supported.
RMatrix column_stochasticize(const RMatrix& limit, const std::vector<double>& source_probs,
                             const BlockPartition& blocks);

}  // namespace dqsim
