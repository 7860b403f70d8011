#include "dqsim/matrix.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "dqsim/kernels.hpp"

namespace dqsim {

void normalize_exact(std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    if (!(sum > 0.0)) throw std::invalid_argument("normalize_exact: nonpositive total mass");
    for (double& x : v) x /= sum;
    double check = 0.0;
    std::size_t arg_max = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        check += v[i];
        if (v[i] > v[arg_max]) arg_max = i;
    }
    v[arg_max] += 1.0 - check;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::fabs(p[i] - q[i]);
    return acc / 2.0;
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Complex{1.0, 0.0};
    return m;
}

RMatrix RMatrix::identity(std::size_t n) {
    RMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != a.cols() || b.rows() != b.cols()) {
        throw std::invalid_argument("matmul: dimension mismatch");
    }
    CMatrix c(a.rows(), b.cols());
    kern::matmul(c.data(), a.data(), b.data(), a.rows());
    return c;
}

RMatrix rmatmul(const RMatrix& a, const RMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != a.cols() || b.rows() != b.cols()) {
        throw std::invalid_argument("rmatmul: dimension mismatch");
    }
    RMatrix c(a.rows(), b.cols());
    kern::rmatmul(c.data(), a.data(), b.data(), a.rows());
    return c;
}

CMatrix adjoint(const CMatrix& m) {
    CMatrix out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = std::conj(m(r, c));
    }
    return out;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

double max_abs_diff(const RMatrix& a, const RMatrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) {
        worst = std::max(worst, std::fabs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

double max_abs(const RMatrix& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows() * m.cols(); ++i) {
        worst = std::max(worst, std::fabs(m.data()[i]));
    }
    return worst;
}

double unitarity_error(const CMatrix& u) {
    return max_abs_diff(matmul(adjoint(u), u), CMatrix::identity(u.rows()));
}

double hermiticity_error(const CMatrix& m) {
    double worst = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = r; c < m.cols(); ++c) {
            worst = std::max(worst, std::abs(m(r, c) - std::conj(m(c, r))));
        }
    }
    return worst;
}

double trace_real(const CMatrix& m) {
    double t = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i).real();
    return t;
}

std::vector<double> real_diagonal(const CMatrix& m) {
    std::vector<double> d(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) d[i] = m(i, i).real();
    return d;
}

double min_hermitian_eigenvalue(const CMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.rows());
    Eigen::MatrixXcd em(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) em(r, c) = m(r, c);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(em, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

}  // namespace dqsim
