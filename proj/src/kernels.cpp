#include "dqsim/kernels.hpp"

#include <cmath>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dqsim::kern {

namespace {
bool g_parallel = true;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}  // namespace

void set_parallel(bool on) { g_parallel = on; }
bool parallel_enabled() { return g_parallel; }

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// ---------------------------------------------------------------- hadamard

static inline void hadamard_pair(cplx* row0, cplx* row1, std::size_t n_cols) {
    for (std::size_t c = 0; c < n_cols; ++c) {
        cplx a = row0[c];
        cplx b = row1[c];
        row0[c] = (a + b) * kInvSqrt2;
        row1[c] = (a - b) * kInvSqrt2;
    }
}

void hadamard_rows_serial(cplx* data, std::size_t n_rows, std::size_t n_cols, int qubit) {
    const std::size_t half = std::size_t{1} << qubit;
    const std::size_t n_pairs = n_rows / 2;
    for (std::size_t p = 0; p < n_pairs; ++p) {
        std::size_t r0 = ((p & ~(half - 1)) << 1) | (p & (half - 1));
        hadamard_pair(data + r0 * n_cols, data + (r0 + half) * n_cols, n_cols);
    }
}

void hadamard_rows_parallel(cplx* data, std::size_t n_rows, std::size_t n_cols, int qubit) {
    const std::size_t half = std::size_t{1} << qubit;
    const std::size_t n_pairs = n_rows / 2;
#pragma omp parallel for schedule(static)
    for (std::size_t p = 0; p < n_pairs; ++p) {
        std::size_t r0 = ((p & ~(half - 1)) << 1) | (p & (half - 1));
        hadamard_pair(data + r0 * n_cols, data + (r0 + half) * n_cols, n_cols);
    }
}

void hadamard_rows(cplx* data, std::size_t n_rows, std::size_t n_cols, int qubit) {
    if (g_parallel && n_rows * n_cols >= 4096) {
        hadamard_rows_parallel(data, n_rows, n_cols, qubit);
    } else {
        hadamard_rows_serial(data, n_rows, n_cols, qubit);
    }
}

// ----------------------------------------------------------------- permute

void permute_rows_serial(cplx* dst, const cplx* src, std::size_t n_rows, std::size_t n_cols,
                         const std::uint64_t* perm) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        std::memcpy(dst + perm[r] * n_cols, src + r * n_cols, n_cols * sizeof(cplx));
    }
}

void permute_rows_parallel(cplx* dst, const cplx* src, std::size_t n_rows, std::size_t n_cols,
                           const std::uint64_t* perm) {
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < n_rows; ++r) {
        std::memcpy(dst + perm[r] * n_cols, src + r * n_cols, n_cols * sizeof(cplx));
    }
}

void permute_rows(cplx* dst, const cplx* src, std::size_t n_rows, std::size_t n_cols,
                  const std::uint64_t* perm) {
    if (g_parallel && n_rows * n_cols >= 4096) {
        permute_rows_parallel(dst, src, n_rows, n_cols, perm);
    } else {
        permute_rows_serial(dst, src, n_rows, n_cols, perm);
    }
}

// ----------------------------------------------------- small dense unitary

// Rows are grouped by the free (non-target) bits; each group of 1<<k rows is
// hit by `mat` in place. `base_of` deposits the group counter into the free
// bit positions.
static inline std::size_t base_of(std::size_t g, const int* targets, int k) {
    std::size_t base = g;
    for (int t = 0; t < k; ++t) {
        std::size_t low = base & ((std::size_t{1} << targets[t]) - 1);
        base = ((base >> targets[t]) << (targets[t] + 1)) | low;
    }
    return base;
}

static void small_unitary_group(cplx* data, std::size_t n_cols, const int* targets, int k,
                                const cplx* mat, std::size_t base, cplx* scratch) {
    const std::size_t dim = std::size_t{1} << k;
    std::vector<std::size_t> rows(dim);
    for (std::size_t b = 0; b < dim; ++b) {
        std::size_t r = base;
        for (int t = 0; t < k; ++t) {
            if ((b >> t) & 1) r |= std::size_t{1} << targets[t];
        }
        rows[b] = r;
    }
    for (std::size_t a = 0; a < dim; ++a) {
        cplx* out = scratch + a * n_cols;
        for (std::size_t c = 0; c < n_cols; ++c) out[c] = cplx{0.0, 0.0};
        for (std::size_t b = 0; b < dim; ++b) {
            const cplx m = mat[a * dim + b];
            const cplx* in = data + rows[b] * n_cols;
            for (std::size_t c = 0; c < n_cols; ++c) out[c] += m * in[c];
        }
    }
    for (std::size_t a = 0; a < dim; ++a) {
        std::memcpy(data + rows[a] * n_cols, scratch + a * n_cols, n_cols * sizeof(cplx));
    }
}

void small_unitary_rows_serial(cplx* data, std::size_t n_rows, std::size_t n_cols,
                               const int* targets, int k, const cplx* mat) {
    const std::size_t n_groups = n_rows >> k;
    std::vector<cplx> scratch((std::size_t{1} << k) * n_cols);
    for (std::size_t g = 0; g < n_groups; ++g) {
        small_unitary_group(data, n_cols, targets, k, mat, base_of(g, targets, k), scratch.data());
    }
}

void small_unitary_rows_parallel(cplx* data, std::size_t n_rows, std::size_t n_cols,
                                 const int* targets, int k, const cplx* mat) {
    const std::size_t n_groups = n_rows >> k;
#pragma omp parallel
    {
        std::vector<cplx> scratch((std::size_t{1} << k) * n_cols);
#pragma omp for schedule(static)
        for (std::size_t g = 0; g < n_groups; ++g) {
            small_unitary_group(data, n_cols, targets, k, mat, base_of(g, targets, k),
                            scratch.data());
        }
    }
}

void small_unitary_rows(cplx* data, std::size_t n_rows, std::size_t n_cols,
                        const int* targets, int k, const cplx* mat) {
    if (g_parallel && (n_rows >> k) > 1 && n_rows * n_cols >= 4096) {
        small_unitary_rows_parallel(data, n_rows, n_cols, targets, k, mat);
    } else {
        small_unitary_rows_serial(data, n_rows, n_cols, targets, k, mat);
    }
}

// ------------------------------------------------------------------ matmul

template <typename T>
static inline void matmul_row(T* C, const T* A, const T* B, std::size_t n, std::size_t r) {
    T* crow = C + r * n;
    for (std::size_t c = 0; c < n; ++c) crow[c] = T{};
    for (std::size_t k = 0; k < n; ++k) {
        const T a = A[r * n + k];
        const T* brow = B + k * n;
        for (std::size_t c = 0; c < n; ++c) crow[c] += a * brow[c];
    }
}

void matmul_serial(cplx* C, const cplx* A, const cplx* B, std::size_t n) {
    for (std::size_t r = 0; r < n; ++r) matmul_row(C, A, B, n, r);
}

void matmul_parallel(cplx* C, const cplx* A, const cplx* B, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < n; ++r) matmul_row(C, A, B, n, r);
}

void matmul(cplx* C, const cplx* A, const cplx* B, std::size_t n) {
    if (g_parallel && n >= 32) {
        matmul_parallel(C, A, B, n);
    } else {
        matmul_serial(C, A, B, n);
    }
}

void rmatmul_serial(double* C, const double* A, const double* B, std::size_t n) {
    for (std::size_t r = 0; r < n; ++r) matmul_row(C, A, B, n, r);
}

void rmatmul_parallel(double* C, const double* A, const double* B, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < n; ++r) matmul_row(C, A, B, n, r);
}

void rmatmul(double* C, const double* A, const double* B, std::size_t n) {
    if (g_parallel && n >= 32) {
        rmatmul_parallel(C, A, B, n);
    } else {
        rmatmul_serial(C, A, B, n);
    }
}

// ---------------------------------------------------------- scaling sweeps

static inline void scale_one_column(double* M, std::size_t n, std::size_t i, double target,
                                    double* col_factors) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += M[j * n + i];
    if (sum <= 0.0) return;  // nothing to scale; residual stays visible
    const double f = target / sum;
    for (std::size_t j = 0; j < n; ++j) M[j * n + i] *= f;
    col_factors[i] *= f;
}

void scale_columns_serial(double* M, std::size_t n, const double* targets,
                          const unsigned char* active, double* col_factors) {
    for (std::size_t i = 0; i < n; ++i) {
        if (active[i]) scale_one_column(M, n, i, targets[i], col_factors);
    }
}

void scale_columns_parallel(double* M, std::size_t n, const double* targets,
                            const unsigned char* active, double* col_factors) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        if (active[i]) scale_one_column(M, n, i, targets[i], col_factors);
    }
}

void scale_columns(double* M, std::size_t n, const double* targets,
                   const unsigned char* active, double* col_factors) {
    if (g_parallel && n >= 64) {
        scale_columns_parallel(M, n, targets, active, col_factors);
    } else {
        scale_columns_serial(M, n, targets, active, col_factors);
    }
}

static inline void scale_one_row(double* M, std::size_t n, std::size_t j, double target,
                                 double* row_factors) {
    double* row = M + j * n;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += row[i];
    if (sum <= 0.0) return;
    const double f = target / sum;
    for (std::size_t i = 0; i < n; ++i) row[i] *= f;
    row_factors[j] *= f;
}

void scale_rows_serial(double* M, std::size_t n, const double* targets,
                       const unsigned char* active, double* row_factors) {
    for (std::size_t j = 0; j < n; ++j) {
        if (active[j]) scale_one_row(M, n, j, targets[j], row_factors);
    }
}

void scale_rows_parallel(double* M, std::size_t n, const double* targets,
                         const unsigned char* active, double* row_factors) {
#pragma omp parallel for schedule(static)
    for (std::size_t j = 0; j < n; ++j) {
        if (active[j]) scale_one_row(M, n, j, targets[j], row_factors);
    }
}

void scale_rows(double* M, std::size_t n, const double* targets,
                const unsigned char* active, double* row_factors) {
    if (g_parallel && n >= 64) {
        scale_rows_parallel(M, n, targets, active, row_factors);
    } else {
        scale_rows_serial(M, n, targets, active, row_factors);
    }
}

double row_residual_serial(const double* M, std::size_t n, const double* targets) {
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double* row = M + j * n;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += row[i];
        worst = std::max(worst, std::fabs(sum - targets[j]));
    }
    return worst;
}

double row_residual_parallel(const double* M, std::size_t n, const double* targets) {
    double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (std::size_t j = 0; j < n; ++j) {
        const double* row = M + j * n;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += row[i];
        worst = std::max(worst, std::fabs(sum - targets[j]));
    }
    return worst;
}

double row_residual(const double* M, std::size_t n, const double* targets) {
    if (g_parallel && n >= 64) return row_residual_parallel(M, n, targets);
    return row_residual_serial(M, n, targets);
}

}  // namespace dqsim::kern
