#pragma once

#include <cstddef>
#include <vector>

#include "dqsim/common.hpp"
#include "dqsim/matrix.hpp"
#include "dqsim/rng.hpp"
#include "dqsim/scaling.hpp"
#include "dqsim/state.hpp"

namespace dqsim {

/// The three dynamics: product (destination independent of source), Dieks
/// (product applied separately inside each minimal block), and the scaling
/// dynamics (squared magnitudes rescaled to the source/destination Born
/// marginals).
enum class DynamicsKind { PD, DD, SD };

const char* kind_name(DynamicsKind kind);

struct DynamicsParams {
    double tol = 1e-10;       // scaling residual target (SD only)
    long max_iter = 100000;   // scaling sweep budget (SD only)
    double zero_tol = 1e-12;  // support threshold on |entry| and mass threshold
};

/// Column-stochastic transition probabilities: entries(j, i) is the
/// probability of destination j given source i.
struct TransitionMatrix {
    RMatrix entries;

    std::size_t dim() const { return entries.rows(); }
    std::vector<double> column(std::size_t i) const;
};

/// Throws unless every column sums to 1 within 1e-12 with entries in [0, 1].
void validate_transition(const TransitionMatrix& s);

/// Connected components of the support graph of u: an edge joins i and k
/// when |u(i, k)| or |u(k, i)| exceeds zero_tol. For (numerically) unitary u
/// these components are exactly the minimal invariant blocks.
BlockPartition minimal_blocks(const CMatrix& u, double zero_tol = 1e-12);

TransitionMatrix pd_transition(const DensityMatrix& rho, const CMatrix& u);
TransitionMatrix dd_transition(const DensityMatrix& rho, const CMatrix& u,
                               double zero_tol = 1e-12);
TransitionMatrix sd_transition(const DensityMatrix& rho, const CMatrix& u,
                               const DynamicsParams& params = {});

TransitionMatrix transition(DynamicsKind kind, const DensityMatrix& rho, const CMatrix& u,
                            const DynamicsParams& params = {});

/// max_j |sum_i S(j<-i) rho_ii - (U rho U†)_jj|
double check_marginalization(const TransitionMatrix& s, const DensityMatrix& rho,
                             const CMatrix& u);

/// Deviation from relabeling invariance: ||D(P rho P†, Q U P†) - Q D(rho, U) P†||_max
/// with permutations given as index maps (p[i] = image of i).
double check_symmetry(DynamicsKind kind, const DensityMatrix& rho, const CMatrix& u,
                      const std::vector<std::size_t>& perm_p,
                      const std::vector<std::size_t>& perm_q, const DynamicsParams& params = {});

/// Cross-block leakage plus worst within-block deviation from the dynamics
/// applied to the renormalized block restriction. Blocks without mass are
/// skipped in the second term.
double check_locality(DynamicsKind kind, const DensityMatrix& rho, const CMatrix& u,
                      const DynamicsParams& params = {});

/// Empirical sensitivity: perturbs (rho, u) `trials` times within max-norm
/// delta (plane rotations for u, mixing with a basis state for rho) and
/// returns the worst transition-matrix shift.
double check_robustness_probe(DynamicsKind kind, const DensityMatrix& rho, const CMatrix& u,
                              double delta, int trials, SplitMix64& rng,
                              const DynamicsParams& params = {});

/// Two-register commutator deviation for u_a on the low factor and u_b on the
/// high factor of rho_ab. Transition matrices compose right-to-left
/// (the first step's matrix is applied first).
double check_commutativity(DynamicsKind kind, const DensityMatrix& rho_ab, const CMatrix& u_a,
                           const CMatrix& u_b, const DynamicsParams& params = {});

}  // namespace dqsim
