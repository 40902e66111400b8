#include "cdspp/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cdspp/errors.hpp"

namespace cdspp {

namespace {

std::string shape_of(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch(std::string(op) + ": " + shape_of(a) + " vs " + shape_of(b));
    }
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionMismatch("ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> Matrix::column(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
}

void Matrix::set_column(std::size_t j, std::span<const double> values) {
    if (values.size() != rows_) throw DimensionMismatch("set_column: wrong length");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix out = a;
    auto o = out.flat();
    auto rb = b.flat();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += rb[i];
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "subtract");
    Matrix out = a;
    auto o = out.flat();
    auto rb = b.flat();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] -= rb[i];
    return out;
}

Matrix operator*(double s, const Matrix& m) {
    Matrix out = m;
    for (double& v : out.flat()) v *= s;
    return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionMismatch("multiply: " + shape_of(a) + " * " + shape_of(b));
    }
    Matrix out(a.rows(), b.cols());
    // i-k-j order keeps both b and out on contiguous rows.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto oi = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto bk = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) oi[j] += aik * bk[j];
        }
    }
    return out;
}

Matrix multiply_at_b(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw DimensionMismatch("multiply_at_b: " + shape_of(a) + "^T * " + shape_of(b));
    }
    Matrix out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto ak = a.row(k);
        auto bk = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            auto oi = out.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) oi[j] += aki * bk[j];
        }
    }
    return out;
}

Matrix multiply_a_bt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw DimensionMismatch("multiply_a_bt: " + shape_of(a) + " * " + shape_of(b) + "^T");
    }
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ai = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            auto bj = b.row(j);
            double sum = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) sum += ai[k] * bj[k];
            out(i, j) = sum;
        }
    }
    return out;
}

Matrix transposed(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
    return out;
}

double frobenius_norm(const Matrix& m) {
    double sum = 0.0;
    for (double v : m.flat()) sum += v * v;
    return std::sqrt(sum);
}

double frobenius_inner(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("frobenius_inner: shape mismatch");
    double sum = 0.0;
    const auto fa = a.flat();
    const auto fb = b.flat();
    for (std::size_t i = 0; i < fa.size(); ++i) sum += fa[i] * fb[i];
    return sum;
}

double max_abs(const Matrix& m) {
    double best = 0.0;
    for (double v : m.flat()) best = std::max(best, std::abs(v));
    return best;
}

double trace(const Matrix& m) {
    const std::size_t n = std::min(m.rows(), m.cols());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += m(i, i);
    return sum;
}

double symmetry_gap(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("symmetry_gap: matrix not square");
    double gap = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            gap = std::max(gap, std::abs(m(i, j) - m(j, i)));
    return gap;
}

bool is_symmetric(const Matrix& m, double relative_tol) {
    if (m.rows() != m.cols()) return false;
    const double scale = max_abs(m);
    return symmetry_gap(m) <= relative_tol * (scale > 0.0 ? scale : 1.0);
}

bool all_finite(const Matrix& m) {
    for (double v : m.flat())
        if (!std::isfinite(v)) return false;
    return true;
}

double column_norm(const Matrix& m, std::size_t j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) sum += m(i, j) * m(i, j);
    return std::sqrt(sum);
}

Matrix hcat(const Matrix& a, const Matrix& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.rows() != b.rows()) {
        throw DimensionMismatch("hcat: " + shape_of(a) + " | " + shape_of(b));
    }
    Matrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto oi = out.row(i);
        auto ai = a.row(i);
        auto bi = b.row(i);
        std::copy(ai.begin(), ai.end(), oi.begin());
        std::copy(bi.begin(), bi.end(), oi.begin() + static_cast<std::ptrdiff_t>(a.cols()));
    }
    return out;
}

Matrix select_columns(const Matrix& m, std::span<const std::size_t> indices) {
    Matrix out(m.rows(), indices.size());
    for (std::size_t j = 0; j < indices.size(); ++j) {
        if (indices[j] >= m.cols()) throw InvalidArgument("select_columns: index out of range");
        for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) = m(i, indices[j]);
    }
    return out;
}

}  // namespace cdspp
