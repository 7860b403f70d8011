#include "dqsim/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "dqsim/kernels.hpp"

namespace dqsim {

void validate_targets(const MarginalTargets& targets) {
    double col_sum = 0.0, row_sum = 0.0;
    for (double r : targets.col_targets) {
        if (r < 0.0) throw std::invalid_argument("marginal targets: negative column target");
        col_sum += r;
    }
    for (double c : targets.row_targets) {
        if (c < 0.0) throw std::invalid_argument("marginal targets: negative row target");
        row_sum += c;
    }
    if (std::fabs(col_sum - 1.0) > 1e-10 || std::fabs(row_sum - 1.0) > 1e-10) {
        throw std::invalid_argument("marginal targets must each sum to 1 within 1e-10");
    }
}

RMatrix squared_magnitudes(const CMatrix& u) {
    RMatrix out(u.rows(), u.cols());
    for (std::size_t i = 0; i < u.rows() * u.cols(); ++i) {
        out.data()[i] = std::norm(u.data()[i]);
    }
    return out;
}

ScalingResult rc_scale(const RMatrix& m, const MarginalTargets& targets,
                       const ScalingOptions& opts) {
    const std::size_t n = m.rows();
    if (m.cols() != n || targets.col_targets.size() != n || targets.row_targets.size() != n) {
        throw std::invalid_argument("rc_scale: dimension mismatch");
    }

    // Clean targets: anything at or below the zero tolerance is an exact zero.
    std::vector<double> r = targets.col_targets;
    std::vector<double> c = targets.row_targets;
    std::vector<unsigned char> col_active(n), row_active(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (r[i] < 0.0 || c[i] < 0.0) throw std::invalid_argument("rc_scale: negative target");
        if (r[i] <= opts.zero_target_tol) r[i] = 0.0;
        if (c[i] <= opts.zero_target_tol) c[i] = 0.0;
        col_active[i] = r[i] > 0.0;
        row_active[i] = c[i] > 0.0;
    }

    if (opts.check_flow) {
        MarginalTargets cleaned{r, c};
        if (!flow_condition_check(m, cleaned).feasible) throw InfeasibleTargetsError{};
    }

    ScalingResult result;
    result.limit = m;
    result.col_factors.assign(n, 1.0);
    result.row_factors.assign(n, 1.0);

    // Zero-target rows and columns are zeroed once and never rescaled.
    double* w = result.limit.data();
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (w[j * n + i] < 0.0) w[j * n + i] = 0.0;  // nonnegativity floor
            if (!col_active[i] || !row_active[j]) w[j * n + i] = 0.0;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!col_active[i]) result.col_factors[i] = 0.0;
        if (!row_active[i]) result.row_factors[i] = 0.0;
    }

    for (;;) {
        kern::scale_columns(w, n, r.data(), col_active.data(), result.col_factors.data());
        ++result.iterations;
        result.residual = kern::row_residual(w, n, c.data());
        if (result.residual <= opts.tol) break;
        if (result.iterations >= opts.max_iter) {
            throw NonConvergenceError(result.iterations, result.residual);
        }
        kern::scale_rows(w, n, c.data(), row_active.data(), result.row_factors.data());
    }
    return result;
}

// ------------------------------------------------------------- flow check

namespace {

// Plain Edmonds-Karp on the bipartite transportation graph. Sizes here are
// desk scale (N columns + N rows + source + sink), so simplicity wins.
struct FlowNetwork {
    struct Edge {
        int to;
        double cap;
        int rev;  // index of the reverse edge in adj[to]
    };
    std::vector<std::vector<Edge>> adj;

    explicit FlowNetwork(int n_nodes) : adj(n_nodes) {}

    void add_edge(int from, int to, double cap) {
        adj[from].push_back({to, cap, static_cast<int>(adj[to].size())});
        adj[to].push_back({from, 0.0, static_cast<int>(adj[from].size()) - 1});
    }

    double max_flow(int s, int t) {
        double flow = 0.0;
        for (;;) {
            std::vector<int> prev_node(adj.size(), -1), prev_edge(adj.size(), -1);
            std::deque<int> queue{s};
            prev_node[s] = s;
            while (!queue.empty() && prev_node[t] < 0) {
                int u = queue.front();
                queue.pop_front();
                for (std::size_t e = 0; e < adj[u].size(); ++e) {
                    const Edge& edge = adj[u][e];
                    if (edge.cap > 1e-15 && prev_node[edge.to] < 0) {
                        prev_node[edge.to] = u;
                        prev_edge[edge.to] = static_cast<int>(e);
                        queue.push_back(edge.to);
                    }
                }
            }
            if (prev_node[t] < 0) return flow;
            double bottleneck = std::numeric_limits<double>::infinity();
            for (int v = t; v != s; v = prev_node[v]) {
                bottleneck = std::min(bottleneck, adj[prev_node[v]][prev_edge[v]].cap);
            }
            for (int v = t; v != s; v = prev_node[v]) {
                Edge& e = adj[prev_node[v]][prev_edge[v]];
                e.cap -= bottleneck;
                adj[v][e.rev].cap += bottleneck;
            }
            flow += bottleneck;
        }
    }
};

}  // namespace

FlowCheckResult flow_condition_check(const RMatrix& support, const MarginalTargets& targets) {
    const std::size_t n = support.rows();
    if (support.cols() != n || targets.col_targets.size() != n ||
        targets.row_targets.size() != n) {
        throw std::invalid_argument("flow_condition_check: dimension mismatch");
    }
    // Node layout: 0 source, 1..n columns, n+1..2n rows, 2n+1 sink.
    const int source = 0;
    const int sink = static_cast<int>(2 * n + 1);
    FlowNetwork net(static_cast<int>(2 * n + 2));

    double demand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        net.add_edge(source, static_cast<int>(1 + i), targets.col_targets[i]);
        demand += targets.col_targets[i];
        net.add_edge(static_cast<int>(n + 1 + i), sink, targets.row_targets[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (support(j, i) > 0.0) {
                net.add_edge(static_cast<int>(1 + i), static_cast<int>(n + 1 + j), 2.0);
            }
        }
    }

    const double flow = net.max_flow(source, sink);
    FlowCheckResult result;
    result.feasible = flow >= demand - 1e-9;
    if (result.feasible) {
        RMatrix witness(n, n);
        // Residual capacity on a reverse edge equals the flow pushed forward.
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& edge : net.adj[static_cast<int>(1 + i)]) {
                if (edge.to >= static_cast<int>(n + 1) && edge.to <= static_cast<int>(2 * n)) {
                    const double pushed = net.adj[edge.to][edge.rev].cap;
                    witness(static_cast<std::size_t>(edge.to) - n - 1, i) = pushed;
                }
            }
        }
        result.witness = std::move(witness);
    }
    return result;
}

// ---------------------------------------------------- column stochasticize

RMatrix column_stochasticize(const RMatrix& limit, const std::vector<double>& source_probs,
                             const BlockPartition& blocks) {
    const std::size_t n = limit.rows();
    if (limit.cols() != n || source_probs.size() != n) {
        throw std::invalid_argument("column_stochasticize: dimension mismatch");
    }
    std::vector<std::size_t> block_of(n, blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (std::size_t idx : blocks[b]) block_of.at(idx) = b;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (block_of[i] >= blocks.size()) {
            throw std::invalid_argument("column_stochasticize: partition does not cover index " +
                                        std::to_string(i));
        }
    }

    std::vector<double> row_sums(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) row_sums[j] += limit(j, i);
    }

    RMatrix s(n, n);
    std::vector<double> column(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(column.begin(), column.end(), 0.0);
        bool degenerate = source_probs[i] <= 1e-12;
        if (!degenerate) {
            double col_sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) col_sum += limit(j, i);
            if (col_sum > 0.0) {
                for (std::size_t j = 0; j < n; ++j) column[j] = limit(j, i);
            } else {
                degenerate = true;  // positive source with empty column: treat as unreachable
            }
        }
        if (degenerate) {
            const auto& block = blocks[block_of[i]];
            double block_mass = 0.0;
            for (std::size_t j : block) block_mass += row_sums[j];
            if (block_mass > 1e-300) {
                for (std::size_t j : block) column[j] = row_sums[j];
            } else {
                for (std::size_t j : block) column[j] = 1.0;
            }
        }
        normalize_exact(column);
        for (std::size_t j = 0; j < n; ++j) s(j, i) = column[j];
    }
    return s;
}

}  // namespace dqsim
