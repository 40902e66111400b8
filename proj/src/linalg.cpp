#include "cdspp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cdspp/errors.hpp"

namespace cdspp {

namespace {

constexpr double kNormFloor = 1e-12;        // column norms below this are "zero"
constexpr double kPivotScale = 1e-12;       // Cholesky pivot floor, times trace/n
constexpr double kSymmetryTol = 1e-10;      // relative symmetry requirement
constexpr int kMaxQlIterations = 100;       // per eigenvalue

void require_square_symmetric(const Matrix& m, const char* what) {
    if (m.empty()) throw InvalidArgument(std::string(what) + ": empty matrix");
    if (m.rows() != m.cols())
        throw DimensionMismatch(std::string(what) + ": matrix is not square");
    if (!is_symmetric(m, kSymmetryTol))
        throw InvalidArgument(std::string(what) + ": matrix is not symmetric");
}

/// Householder reduction of the symmetric matrix held in v to tridiagonal
/// form; v accumulates the orthogonal transformation, d gets the diagonal,
/// e the subdiagonal (e[0] unused).
void tridiagonalize(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = v.rows();
    for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0.0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (std::size_t k = j + 1; k < i; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k < i; ++k) v(k, j) -= f * e[k] + g * d[k];
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate the Householder transformations.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL on the tridiagonal (d, e); v accumulates eigenvectors.
void ql_implicit_shift(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = v.rows();
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::ldexp(1.0, -52);
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n && std::abs(e[m]) > eps * tst1) ++m;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > kMaxQlIterations) throw NoConvergence(kMaxQlIterations);

                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0.0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0;
                double s2 = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (std::size_t k = 0; k < n; ++k) {
                        h = v(k, i + 1);
                        v(k, i + 1) = s * v(k, i) + c * h;
                        v(k, i) = c * v(k, i) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

/// Largest-|entry|-positive sign convention, ties to the lowest index.
void fix_column_signs(Matrix& v) {
    for (std::size_t j = 0; j < v.cols(); ++j) {
        std::size_t lead = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < v.rows(); ++i) {
            const double a = std::abs(v(i, j));
            if (a > best) {
                best = a;
                lead = i;
            }
        }
        if (v(lead, j) < 0.0)
            for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) = -v(i, j);
    }
}

/// Reorders eigenpairs to descending eigenvalue, stable on ties.
EigenResult sorted_descending(const std::vector<double>& d, const Matrix& v) {
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });

    EigenResult out;
    out.values.resize(n);
    out.vectors = Matrix(v.rows(), n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = d[order[j]];
        for (std::size_t i = 0; i < v.rows(); ++i) out.vectors(i, j) = v(i, order[j]);
    }
    fix_column_signs(out.vectors);
    return out;
}

/// Solves L·X = B for lower-triangular L.
Matrix forward_solve(const Matrix& l, const Matrix& b) {
    const std::size_t n = l.rows();
    Matrix x = b;
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = x(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
            x(i, c) = s / l(i, i);
        }
    }
    return x;
}

/// Solves Lᵀ·X = B for lower-triangular L.
Matrix backward_solve_transposed(const Matrix& l, const Matrix& b) {
    const std::size_t n = l.rows();
    Matrix x = b;
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t i = n; i-- > 0;) {
            double s = x(i, c);
            for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x(k, c);
            x(i, c) = s / l(i, i);
        }
    }
    return x;
}

}  // namespace

FeatureMatrix l2_normalize_columns(const FeatureMatrix& m) {
    FeatureMatrix out = m;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const double norm = column_norm(m, j);
        if (norm < kNormFloor) throw ZeroColumn(j);
        for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) /= norm;
    }
    return out;
}

Matrix cholesky(const Matrix& m) {
    require_square_symmetric(m, "cholesky");
    const std::size_t n = m.rows();
    const double pivot_floor = kPivotScale * trace(m) / static_cast<double>(n);

    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (diag <= pivot_floor || diag <= 0.0) throw NotPositiveDefinite(j);
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

EigenResult sym_eig(const Matrix& m) {
    require_square_symmetric(m, "sym_eig");
    const std::size_t n = m.rows();
    Matrix v = m;
    std::vector<double> d(n), e(n);
    tridiagonalize(v, d, e);
    ql_implicit_shift(v, d, e);
    return sorted_descending(d, v);
}

EigenResult generalized_sym_eig(const Matrix& a, const Matrix& m, std::size_t d) {
    require_square_symmetric(a, "generalized_sym_eig");
    require_square_symmetric(m, "generalized_sym_eig");
    if (a.rows() != m.rows())
        throw DimensionMismatch("generalized_sym_eig: operand sizes differ");
    if (d < 1 || d > a.rows())
        throw InvalidArgument("generalized_sym_eig: d out of range");

    const Matrix l = cholesky(m);

    // C = L⁻¹ A L⁻ᵀ, symmetrized to absorb rounding.
    const Matrix y = forward_solve(l, a);
    Matrix c = transposed(forward_solve(l, transposed(y)));
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = i + 1; j < c.cols(); ++j) {
            const double avg = 0.5 * (c(i, j) + c(j, i));
            c(i, j) = avg;
            c(j, i) = avg;
        }

    const EigenResult reduced = sym_eig(c);

    EigenResult out;
    out.values.assign(reduced.values.begin(), reduced.values.begin() + d);
    Matrix top(reduced.vectors.rows(), d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < reduced.vectors.rows(); ++i)
            top(i, j) = reduced.vectors(i, j);

    out.vectors = backward_solve_transposed(l, top);

    // v = L⁻ᵀy keeps yᵀy = vᵀMv; renormalize anyway so VᵀMV has exact unit
    // diagonal, then re-fix signs (the back-substitution can flip the lead).
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> mv(m.rows(), 0.0);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t k = 0; k < m.cols(); ++k) mv[i] += m(i, k) * out.vectors(k, j);
        double q = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) q += out.vectors(i, j) * mv[i];
        const double scale = 1.0 / std::sqrt(q);
        for (std::size_t i = 0; i < m.rows(); ++i) out.vectors(i, j) *= scale;
    }
    fix_column_signs(out.vectors);
    return out;
}

PcaModel pca_fit(const FeatureMatrix& m, std::size_t k) {
    if (m.empty()) throw InvalidArgument("pca_fit: empty matrix");
    if (m.cols() < 2) throw InvalidArgument("pca_fit: need at least two samples");
    if (k < 1 || k > std::min(m.rows(), m.cols() - 1))
        throw InvalidArgument("pca_fit: component count out of range");
    if (!all_finite(m)) throw InvalidArgument("pca_fit: non-finite entries");

    const std::size_t dim = m.rows();
    const std::size_t n = m.cols();

    PcaModel model;
    model.requested = k;
    model.mean.assign(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += m(i, j);
        model.mean[i] = s / static_cast<double>(n);
    }

    FeatureMatrix centered = m;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < n; ++j) centered(i, j) -= model.mean[i];

    Matrix cov = multiply_a_bt(centered, centered);
    const double denom = static_cast<double>(n - 1);
    for (double& x : cov.flat()) x /= denom;

    const EigenResult eig = sym_eig(cov);

    const double lead = eig.values.empty() ? 0.0 : std::max(eig.values.front(), 0.0);
    const double variance_floor = lead * 1e-10;
    std::size_t positive = 0;
    while (positive < eig.values.size() && eig.values[positive] > variance_floor &&
           eig.values[positive] > 0.0)
        ++positive;

    const std::size_t kept = std::min(k, positive);
    model.rank_deficient = kept < k;
    model.variances.assign(eig.values.begin(), eig.values.begin() + kept);
    model.directions = Matrix(dim, kept);
    for (std::size_t j = 0; j < kept; ++j)
        for (std::size_t i = 0; i < dim; ++i) model.directions(i, j) = eig.vectors(i, j);
    return model;
}

FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& m) {
    if (m.rows() != model.mean.size())
        throw DimensionMismatch("pca_transform: dimension differs from the fitted model");

    FeatureMatrix centered = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) centered(i, j) -= model.mean[i];
    return multiply_at_b(model.directions, centered);
}

}  // namespace cdspp
