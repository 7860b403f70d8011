#pragma once

#include <cstddef>
#include <vector>

#include "dqsim/common.hpp"

namespace dqsim {

/// Dense row-major complex matrix. Entry (j, i) of a transition-style
/// matrix is read as "destination j given source i".
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static CMatrix identity(std::size_t n);

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Complex* data() { return data_.data(); }
    const Complex* data() const { return data_.data(); }

    bool operator==(const CMatrix&) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Complex> data_;
};

/// Dense row-major real matrix.
class RMatrix {
public:
    RMatrix() = default;
    RMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static RMatrix identity(std::size_t n);
    static RMatrix zero(std::size_t rows, std::size_t cols) { return RMatrix(rows, cols); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const double& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool operator==(const RMatrix&) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

CMatrix matmul(const CMatrix& a, const CMatrix& b);
RMatrix rmatmul(const RMatrix& a, const RMatrix& b);
CMatrix adjoint(const CMatrix& m);

double max_abs_diff(const CMatrix& a, const CMatrix& b);
double max_abs_diff(const RMatrix& a, const RMatrix& b);
double max_abs(const RMatrix& m);

/// ||U†U - I||_max
double unitarity_error(const CMatrix& u);
/// max |m(i,j) - conj(m(j,i))|
double hermiticity_error(const CMatrix& m);
double trace_real(const CMatrix& m);
std::vector<double> real_diagonal(const CMatrix& m);

/// Smallest eigenvalue of a Hermitian matrix (dense solve; test/validation use).
double min_hermitian_eigenvalue(const CMatrix& m);

}  // namespace dqsim
