#include "lgspi/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "lgspi/kernels.hpp"

namespace lgspi {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols_) throw std::invalid_argument("ragged matrix rows");
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

Matrix Matrix::column(std::span<const double> v) {
    Matrix m(v.size(), 1);
    std::copy(v.begin(), v.end(), m.data_.begin());
    return m;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    assert(r0 + nr <= rows_ && c0 + nc <= cols_);
    Matrix out(nr, nc);
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t c = 0; c < nc; ++c) out(r, c) = (*this)(r0 + r, c0 + c);
    return out;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& m) {
    assert(r0 + m.rows() <= rows_ && c0 + m.cols() <= cols_);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) (*this)(r0 + r, c0 + c) = m(r, c);
}

void Matrix::add_block(std::size_t r0, std::size_t c0, const Matrix& m) {
    assert(r0 + m.rows() <= rows_ && c0 + m.cols() <= cols_);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) (*this)(r0 + r, c0 + c) += m(r, c);
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

double Matrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix add shape");
    Matrix out = a;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) out.data()[i] += b.data()[i];
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix sub shape");
    Matrix out = a;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) out.data()[i] -= b.data()[i];
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul shape");
    Matrix c(a.rows(), b.cols());
    if (c.empty() || a.cols() == 0) return c;
    kernels::active().gemm_nn(a.rows(), b.cols(), a.cols(), a.data(), a.cols(), b.data(), b.cols(),
                              c.data(), c.cols());
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("matmul_nt shape");
    Matrix c(a.rows(), b.rows());
    if (c.empty() || a.cols() == 0) return c;
    kernels::active().gemm_nt(a.rows(), b.rows(), a.cols(), a.data(), a.cols(), b.data(), b.cols(),
                              c.data(), c.cols());
    return c;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec shape");
    Vector y(a.rows(), 0.0);
    if (a.cols() == 0) return y;
    const auto& k = kernels::active();
    for (std::size_t r = 0; r < a.rows(); ++r) y[r] = k.dot(a.data() + r * a.cols(), x.data(), x.size());
    return y;
}

Vector add(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector add shape");
    Vector out(a.begin(), a.end());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += b[i];
    return out;
}

Vector sub(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector sub shape");
    Vector out(a.begin(), a.end());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] -= b[i];
    return out;
}

Matrix select(const Matrix& m, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    Matrix out(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = m(rows[r], cols[c]);
    return out;
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) std::copy(m.row(rows[r]).begin(), m.row(rows[r]).end(), out.row(r).begin());
    return out;
}

Vector select(std::span<const double> v, std::span<const std::size_t> idx) {
    Vector out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
    return out;
}

void mirror_lower(Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = r + 1; c < m.cols(); ++c) m(r, c) = m(c, r);
}

double max_abs(const Matrix& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows() * m.cols(); ++i) best = std::max(best, std::abs(m.data()[i]));
    return best;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
        best = std::max(best, std::abs(a.data()[i] - b.data()[i]));
    return best;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) return INFINITY;
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(a[i] - b[i]));
    return best;
}

double asymmetry(const Matrix& m) {
    if (m.rows() != m.cols()) return INFINITY;
    double best = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = r + 1; c < m.cols(); ++c) best = std::max(best, std::abs(m(r, c) - m(c, r)));
    return best;
}

double min_eigenvalue(const Matrix& sym) {
    if (sym.rows() == 0) return INFINITY;
    Eigen::MatrixXd e(sym.rows(), sym.cols());
    for (std::size_t r = 0; r < sym.rows(); ++r)
        for (std::size_t c = 0; c < sym.cols(); ++c) e(r, c) = sym(r, c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

Matrix cholesky(const Matrix& spd) {
    const std::size_t n = spd.rows();
    Matrix l(n, n);
    const auto& k = kernels::active();
    for (std::size_t j = 0; j < n; ++j) {
        const double d = spd(j, j) - k.dot(l.data() + j * n, l.data() + j * n, j);
        if (!(d > 0.0)) throw std::domain_error("cholesky: matrix is not positive definite");
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i)
            l(i, j) = (spd(i, j) - k.dot(l.data() + i * n, l.data() + j * n, j)) / ljj;
    }
    return l;
}

Matrix cholesky_solve(const Matrix& chol_lower, const Matrix& b) {
    const std::size_t n = chol_lower.rows();
    if (b.rows() != n) throw std::invalid_argument("cholesky_solve shape");
    Matrix x = b;
    // forward: L y = b
    for (std::size_t c = 0; c < x.cols(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = x(i, c);
            for (std::size_t p = 0; p < i; ++p) s -= chol_lower(i, p) * x(p, c);
            x(i, c) = s / chol_lower(i, i);
        }
        // backward: L^T x = y
        for (std::size_t i = n; i-- > 0;) {
            double s = x(i, c);
            for (std::size_t p = i + 1; p < n; ++p) s -= chol_lower(p, i) * x(p, c);
            x(i, c) = s / chol_lower(i, i);
        }
    }
    return x;
}

}  // namespace lgspi
