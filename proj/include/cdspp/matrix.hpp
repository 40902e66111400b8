#ifndef CDSPP_MATRIX_HPP
#define CDSPP_MATRIX_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cdspp {

/// Dense real matrix, row-major storage.
///
/// Feature matrices follow the samples-as-columns convention: a d x n matrix
/// holds n samples of dimension d, column j being sample j.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, value) {}

    /// Builds from nested braces: Matrix{{1,2},{3,4}} is 2x2 row-major.
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::span<double> flat() { return data_; }
    std::span<const double> flat() const { return data_; }

    /// Copies column j into a contiguous vector.
    std::vector<double> column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const double> values);

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Feature matrix: columns are samples, rows are feature dimensions.
using FeatureMatrix = Matrix;

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& m);

/// a * b with the usual dimension rules; throws DimensionMismatch.
Matrix multiply(const Matrix& a, const Matrix& b);

/// a^T * b without forming the transpose.
Matrix multiply_at_b(const Matrix& a, const Matrix& b);

/// a * b^T without forming the transpose.
Matrix multiply_a_bt(const Matrix& a, const Matrix& b);

Matrix transposed(const Matrix& m);

double frobenius_norm(const Matrix& m);

/// Entrywise inner product Σ_ij a(i,j)·b(i,j); shapes must match.
double frobenius_inner(const Matrix& a, const Matrix& b);

double max_abs(const Matrix& m);
double trace(const Matrix& m);

/// Largest |m(i,j) - m(j,i)| over all pairs; 0 for empty input.
double symmetry_gap(const Matrix& m);

/// True when the symmetry gap is within tol * max_abs(m).
bool is_symmetric(const Matrix& m, double relative_tol = 1e-10);

/// All entries finite (no NaN/Inf).
bool all_finite(const Matrix& m);

/// Euclidean norm of column j.
double column_norm(const Matrix& m, std::size_t j);

/// Horizontal concatenation [a, b]; row counts must agree.
Matrix hcat(const Matrix& a, const Matrix& b);

/// Select columns by index, in the given order.
Matrix select_columns(const Matrix& m, std::span<const std::size_t> indices);

}  // namespace cdspp

#endif  // CDSPP_MATRIX_HPP
