#include "dqsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dqsim {

const char* kind_name(DynamicsKind kind) {
    switch (kind) {
        case DynamicsKind::PD: return "pd";
        case DynamicsKind::DD: return "dd";
        case DynamicsKind::SD: return "sd";
    }
    return "?";
}

std::vector<double> TransitionMatrix::column(std::size_t i) const {
    std::vector<double> col(dim());
    for (std::size_t j = 0; j < dim(); ++j) col[j] = entries(j, i);
    return col;
}

void validate_transition(const TransitionMatrix& s) {
    const std::size_t n = s.dim();
    if (s.entries.cols() != n) throw std::invalid_argument("transition matrix is not square");
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = s.entries(j, i);
            if (v < 0.0 || v > 1.0 + 1e-12) {
                throw std::invalid_argument("transition entry outside [0, 1]");
            }
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-12) {
            throw std::invalid_argument("transition column " + std::to_string(i) +
                                        " sums to " + std::to_string(sum));
        }
    }
}

// ------------------------------------------------------------------ blocks

BlockPartition minimal_blocks(const CMatrix& u, double zero_tol) {
    const std::size_t n = u.rows();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = r + 1; c < n; ++c) {
            if (std::abs(u(r, c)) > zero_tol || std::abs(u(c, r)) > zero_tol) {
                parent[find(r)] = find(c);
            }
        }
    }
    std::vector<std::vector<std::size_t>> by_root(n);
    for (std::size_t i = 0; i < n; ++i) by_root[find(i)].push_back(i);
    BlockPartition blocks;
    for (auto& members : by_root) {
        if (!members.empty()) blocks.push_back(std::move(members));
    }
    return blocks;  // members ascend; blocks ordered by smallest element
}

// --------------------------------------------------------------- dynamics

TransitionMatrix pd_transition(const DensityMatrix& rho, const CMatrix& u) {
    if (u.rows() != rho.dim() || u.cols() != rho.dim()) {
        throw std::invalid_argument("pd_transition: dimension mismatch");
    }
    const std::vector<double> dest = born_distribution(evolve(rho, u));
    const std::size_t n = dest.size();
    TransitionMatrix s{RMatrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) s.entries(j, i) = dest[j];
    }
    return s;
}

namespace {

CMatrix submatrix(const CMatrix& m, const std::vector<std::size_t>& idx) {
    CMatrix out(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t c = 0; c < idx.size(); ++c) out(r, c) = m(idx[r], idx[c]);
    }
    return out;
}

// Destination distribution of the product dynamics on one block: the
// diagonal of U_L (rho_L / mass) U_L†, clamped and normalized. Blocks with
// no mass fall back to uniform (the block is unreachable in sampling; a
// total column keeps the matrix stochastic).
std::vector<double> block_destination(const CMatrix& rho, const CMatrix& u,
                                      const std::vector<std::size_t>& block, double zero_tol) {
    const CMatrix rho_l = submatrix(rho, block);
    double mass = trace_real(rho_l);
    if (mass <= zero_tol) {
        return std::vector<double>(block.size(), 1.0 / static_cast<double>(block.size()));
    }
    const CMatrix u_l = submatrix(u, block);
    CMatrix scaled = rho_l;
    for (std::size_t i = 0; i < scaled.rows() * scaled.cols(); ++i) {
        scaled.data()[i] /= mass;
    }
    std::vector<double> dest = real_diagonal(matmul(matmul(u_l, scaled), adjoint(u_l)));
    for (double& d : dest) d = std::max(d, 0.0);
    normalize_exact(dest);
    return dest;
}

}  // namespace

TransitionMatrix dd_transition(const DensityMatrix& rho, const CMatrix& u, double zero_tol) {
    if (u.rows() != rho.dim() || u.cols() != rho.dim()) {
        throw std::invalid_argument("dd_transition: dimension mismatch");
    }
    const BlockPartition blocks = minimal_blocks(u, zero_tol);
    const std::size_t n = rho.dim();
    TransitionMatrix s{RMatrix(n, n)};
    for (const auto& block : blocks) {
        const std::vector<double> dest = block_destination(rho.entries, u, block, zero_tol);
        for (std::size_t i : block) {
            for (std::size_t jj = 0; jj < block.size(); ++jj) s.entries(block[jj], i) = dest[jj];
        }
    }
    return s;
}

TransitionMatrix sd_transition(const DensityMatrix& rho, const CMatrix& u,
                               const DynamicsParams& params) {
    if (u.rows() != rho.dim() || u.cols() != rho.dim()) {
        throw std::invalid_argument("sd_transition: dimension mismatch");
    }
    const RMatrix u0 = squared_magnitudes(u);
    std::vector<double> sources = real_diagonal(rho.entries);
    for (double& p : sources) p = std::max(p, 0.0);
    std::vector<double> dests = real_diagonal(evolve(rho, u).entries);
    for (double& p : dests) p = std::max(p, 0.0);

    ScalingOptions opts;
    opts.tol = params.tol;
    opts.max_iter = params.max_iter;
    opts.zero_target_tol = params.zero_tol;
    const ScalingResult scaled = rc_scale(u0, MarginalTargets{sources, dests}, opts);

    const BlockPartition blocks = minimal_blocks(u, params.zero_tol);
    return TransitionMatrix{column_stochasticize(scaled.limit, sources, blocks)};
}

TransitionMatrix transition(DynamicsKind kind, const DensityMatrix& rho, const CMatrix& u,
                            const DynamicsParams& params) {
    switch (kind) {
        case DynamicsKind::PD: return pd_transition(rho, u);
        case DynamicsKind::DD: return dd_transition(rho, u, params.zero_tol);
        case DynamicsKind::SD: return sd_transition(rho, u, params);
    }
    throw std::invalid_argument("unknown dynamics kind");
}

// ---------------------------------------------------------------- checkers

double check_marginalization(const TransitionMatrix& s, const DensityMatrix& rho,
                             const CMatrix& u) {
    const std::size_t n = rho.dim();
    if (s.dim() != n) throw std::invalid_argument("check_marginalization: dimension mismatch");
    const std::vector<double> source = real_diagonal(rho.entries);
    const std::vector<double> dest = real_diagonal(evolve(rho, u).entries);
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += s.entries(j, i) * source[i];
        worst = std::max(worst, std::fabs(acc - dest[j]));
    }
    return worst;
}

namespace {

void validate_permutation(const std::vector<std::size_t>& p, std::size_t n) {
    if (p.size() != n) throw std::invalid_argument("permutation length mismatch");
    std::vector<char> seen(n, 0);
    for (std::size_t v : p) {
        if (v >= n || seen[v]) throw std::invalid_argument("not a permutation");
        seen[v] = 1;
    }
}

}  // namespace

double check_symmetry(DynamicsKind kind, const DensityMatrix& rho, const CMatrix& u,
                      const std::vector<std::size_t>& perm_p,
                      const std::vector<std::size_t>& perm_q, const DynamicsParams& params) {
    const std::size_t n = rho.dim();
    validate_permutation(perm_p, n);
    validate_permutation(perm_q, n);

    DensityMatrix rho_p{CMatrix(n, n)};
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) rho_p.entries(perm_p[r], perm_p[c]) = rho.entries(r, c);
    }
    CMatrix u_qp(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) u_qp(perm_q[r], perm_p[c]) = u(r, c);
    }

    const TransitionMatrix lhs = transition(kind, rho_p, u_qp, params);
    const TransitionMatrix base = transition(kind, rho, u, params);
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const double rhs = base.entries(j, i);
            worst = std::max(worst, std::fabs(lhs.entries(perm_q[j], perm_p[i]) - rhs));
        }
    }
    return worst;
}

double check_locality(DynamicsKind kind, const DensityMatrix& rho, const CMatrix& u,
                      const DynamicsParams& params) {
    const std::size_t n = rho.dim();
    const BlockPartition blocks = minimal_blocks(u, params.zero_tol);
    const TransitionMatrix s = transition(kind, rho, u, params);

    std::vector<std::size_t> block_of(n);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (std::size_t idx : blocks[b]) block_of[idx] = b;
    }

    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (block_of[j] != block_of[i]) worst = std::max(worst, std::fabs(s.entries(j, i)));
        }
    }

    for (const auto& block : blocks) {
        const CMatrix rho_l = submatrix(rho.entries, block);
        const double mass = trace_real(rho_l);
        if (mass <= params.zero_tol) continue;  // restriction is not normalizable
        DensityMatrix rho_norm{rho_l};
        for (std::size_t i = 0; i < rho_norm.entries.rows() * rho_norm.entries.cols(); ++i) {
            rho_norm.entries.data()[i] /= mass;
        }
        const TransitionMatrix local = transition(kind, rho_norm, submatrix(u, block), params);
        for (std::size_t jj = 0; jj < block.size(); ++jj) {
            for (std::size_t ii = 0; ii < block.size(); ++ii) {
                worst = std::max(worst, std::fabs(s.entries(block[jj], block[ii]) -
                                                  local.entries(jj, ii)));
            }
        }
    }
    return worst;
}

double check_robustness_probe(DynamicsKind kind, const DensityMatrix& rho, const CMatrix& u,
                              double delta, int trials, SplitMix64& rng,
                              const DynamicsParams& params) {
    if (delta < 0.0) throw std::invalid_argument("check_robustness_probe: negative delta");
    const std::size_t n = rho.dim();
    const TransitionMatrix base = transition(kind, rho, u, params);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        // Exact plane rotation between two random columns keeps u* unitary
        // while staying within delta in max norm.
        const std::size_t a = static_cast<std::size_t>(rng.next_below(n));
        std::size_t b = static_cast<std::size_t>(rng.next_below(n - 1));
        if (b >= a) ++b;
        const double theta = delta * rng.next_double();
        const double cs = std::cos(theta), sn = std::sin(theta);
        CMatrix u_star = u;
        for (std::size_t r = 0; r < n; ++r) {
            const Complex ca = u(r, a), cb = u(r, b);
            u_star(r, a) = cs * ca + sn * cb;
            u_star(r, b) = cs * cb - sn * ca;
        }
        // Mixing with a basis state keeps rho* a state exactly.
        const double lambda = 0.5 * delta * rng.next_double();
        const std::uint64_t m = rng.next_below(n);
        DensityMatrix rho_star = rho;
        for (std::size_t i = 0; i < n * n; ++i) rho_star.entries.data()[i] *= (1.0 - lambda);
        rho_star.entries(m, m) += lambda;

        const TransitionMatrix probe = transition(kind, rho_star, u_star, params);
        worst = std::max(worst, max_abs_diff(base.entries, probe.entries));
    }
    return worst;
}

double check_commutativity(DynamicsKind kind, const DensityMatrix& rho_ab, const CMatrix& u_a,
                           const CMatrix& u_b, const DynamicsParams& params) {
    const std::size_t na = u_a.rows();
    const std::size_t nb = u_b.rows();
    const std::size_t n = rho_ab.dim();
    if (na * nb != n) {
        throw std::invalid_argument("check_commutativity: register dimensions do not factor rho");
    }
    // Global index g = ib * na + ia: register A varies fastest.
    CMatrix ea(n, n), eb(n, n);
    for (std::size_t ib = 0; ib < nb; ++ib) {
        for (std::size_t r = 0; r < na; ++r) {
            for (std::size_t c = 0; c < na; ++c) ea(ib * na + r, ib * na + c) = u_a(r, c);
        }
    }
    for (std::size_t ia = 0; ia < na; ++ia) {
        for (std::size_t r = 0; r < nb; ++r) {
            for (std::size_t c = 0; c < nb; ++c) eb(r * na + ia, c * na + ia) = u_b(r, c);
        }
    }

    const TransitionMatrix s_a = transition(kind, rho_ab, ea, params);
    const TransitionMatrix s_ab = transition(kind, evolve(rho_ab, ea), eb, params);
    const TransitionMatrix s_b = transition(kind, rho_ab, eb, params);
    const TransitionMatrix s_ba = transition(kind, evolve(rho_ab, eb), ea, params);

    const RMatrix order_ab = rmatmul(s_ab.entries, s_a.entries);  // A first, then B
    const RMatrix order_ba = rmatmul(s_ba.entries, s_b.entries);
    return max_abs_diff(order_ab, order_ba);
}

}  // namespace dqsim
