#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

// Data-parallel cores. Every kernel comes as a _serial reference and a
// _parallel OpenMP variant with bitwise-identical output: the parallel
// versions assign each output element to exactly one thread and keep the
// per-element summation order fixed. The unsuffixed name dispatches on the
// process-wide parallel switch.

namespace dqsim::kern {

using cplx = std::complex<double>;

void set_parallel(bool on);
bool parallel_enabled();
int thread_count();

// Hadamard butterfly on bit `qubit` of the row index. `data` holds n_rows
// rows of n_cols contiguous entries each; a statevector is n_cols == 1.
void hadamard_rows_serial(cplx* data, std::size_t n_rows, std::size_t n_cols, int qubit);
void hadamard_rows_parallel(cplx* data, std::size_t n_rows, std::size_t n_cols, int qubit);
void hadamard_rows(cplx* data, std::size_t n_rows, std::size_t n_cols, int qubit);

// dst row perm[r] = src row r (perm a bijection on [0, n_rows)).
void permute_rows_serial(cplx* dst, const cplx* src, std::size_t n_rows, std::size_t n_cols,
                         const std::uint64_t* perm);
void permute_rows_parallel(cplx* dst, const cplx* src, std::size_t n_rows, std::size_t n_cols,
                           const std::uint64_t* perm);
void permute_rows(cplx* dst, const cplx* src, std::size_t n_rows, std::size_t n_cols,
                  const std::uint64_t* perm);

// Apply a dense (1<<k) x (1<<k) matrix `mat` (row-major) to the row-index
// bits listed in `targets` (ascending). Touches every row once.
void small_unitary_rows_serial(cplx* data, std::size_t n_rows, std::size_t n_cols,
                               const int* targets, int k, const cplx* mat);
void small_unitary_rows_parallel(cplx* data, std::size_t n_rows, std::size_t n_cols,
                                 const int* targets, int k, const cplx* mat);
void small_unitary_rows(cplx* data, std::size_t n_rows, std::size_t n_cols,
                        const int* targets, int k, const cplx* mat);

// C = A * B, all square n x n row-major.
void matmul_serial(cplx* C, const cplx* A, const cplx* B, std::size_t n);
void matmul_parallel(cplx* C, const cplx* A, const cplx* B, std::size_t n);
void matmul(cplx* C, const cplx* A, const cplx* B, std::size_t n);

void rmatmul_serial(double* C, const double* A, const double* B, std::size_t n);
void rmatmul_parallel(double* C, const double* A, const double* B, std::size_t n);
void rmatmul(double* C, const double* A, const double* B, std::size_t n);

// One column-normalization step of the scaling iteration: every column i
// with active[i] != 0 is rescaled to sum to targets[i]; col_factors[i]
// accumulates the applied scale. Columns with (near-)zero sums are skipped.
void scale_columns_serial(double* M, std::size_t n, const double* targets,
                          const unsigned char* active, double* col_factors);
void scale_columns_parallel(double* M, std::size_t n, const double* targets,
                            const unsigned char* active, double* col_factors);
void scale_columns(double* M, std::size_t n, const double* targets,
                   const unsigned char* active, double* col_factors);

void scale_rows_serial(double* M, std::size_t n, const double* targets,
                       const unsigned char* active, double* row_factors);
void scale_rows_parallel(double* M, std::size_t n, const double* targets,
                         const unsigned char* active, double* row_factors);
void scale_rows(double* M, std::size_t n, const double* targets,
                const unsigned char* active, double* row_factors);

// max_j |sum_i M(j, i) - targets[j]|
double row_residual_serial(const double* M, std::size_t n, const double* targets);
double row_residual_parallel(const double* M, std::size_t n, const double* targets);
double row_residual(const double* M, std::size_t n, const double* targets);

}  // namespace dqsim::kern
