#pragma once

// Small dense row-major matrices. Products go through the active kernel table
// (see kernels.hpp); everything else is plain element access.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace lgspi {

using Vector = std::vector<double>;

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);
    static Matrix column(std::span<const double> v);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const Matrix& m);
    void add_block(std::size_t r0, std::size_t c0, const Matrix& m);

    Matrix transpose() const;
    double trace() const;

    // Exact equality of shape and every entry (bit-level for finite values).
    friend bool operator==(const Matrix& a, const Matrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);

// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
// a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// a * x
Vector matvec(const Matrix& a, std::span<const double> x);

Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);

// Gather rows/columns by index list.
Matrix select(const Matrix& m, std::span<const std::size_t> rows, std::span<const std::size_t> cols);
Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows);
Vector select(std::span<const double> v, std::span<const std::size_t> idx);

// Copy the lower triangle onto the upper one.
void mirror_lower(Matrix& m);

double max_abs(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double asymmetry(const Matrix& m);

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& sym);

// Lower Cholesky factor of a symmetric positive definite matrix. Throws
// std::domain_error on a non-positive pivot.
Matrix cholesky(const Matrix& spd);

// Solves (L L^T) X = B for X given the lower Cholesky factor L.
Matrix cholesky_solve(const Matrix& chol_lower, const Matrix& b);

}  // namespace lgspi
