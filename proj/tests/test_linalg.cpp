#include <doctest.h>

#include <cmath>
#include <vector>

#include "cdspp/errors.hpp"
#include "cdspp/linalg.hpp"
#include "common.hpp"

using namespace cdspp;
using cdspp::testing::random_matrix;
using cdspp::testing::random_spd;
using cdspp::testing::random_symmetric;
using cdspp::testing::relative_gap;

namespace {

Matrix reconstruct(const EigenResult& e) {
    Matrix scaled = e.vectors;
    for (std::size_t j = 0; j < scaled.cols(); ++j)
        for (std::size_t i = 0; i < scaled.rows(); ++i) scaled(i, j) *= e.values[j];
    return multiply_a_bt(scaled, e.vectors);
}

double max_off_identity(const Matrix& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            worst = std::max(worst, std::abs(m(i, j) - (i == j ? 1.0 : 0.0)));
    return worst;
}

}  // namespace

TEST_CASE("l2_normalize_columns scales to unit norm and keeps direction") {
    const FeatureMatrix m{{3.0, 1.0}, {4.0, 0.0}};
    const FeatureMatrix out = l2_normalize_columns(m);
    CHECK(out(0, 0) == doctest::Approx(0.6));
    CHECK(out(1, 0) == doctest::Approx(0.8));
    CHECK(out(0, 1) == 1.0);
    CHECK(out(1, 1) == 0.0);

    const FeatureMatrix degenerate{{1.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_WITH_AS(l2_normalize_columns(degenerate),
                         "column 1 has (near-)zero norm", ZeroColumn);
}

TEST_CASE("cholesky factors by hand-checkable values") {
    CHECK(cholesky(Matrix::identity(3)) == Matrix::identity(3));

    const Matrix m{{4.0, 2.0}, {2.0, 5.0}};
    const Matrix l = cholesky(m);
    CHECK(l(0, 0) == doctest::Approx(2.0));
    CHECK(l(0, 1) == 0.0);
    CHECK(l(1, 0) == doctest::Approx(1.0));
    CHECK(l(1, 1) == doctest::Approx(2.0));
    CHECK(relative_gap(multiply_a_bt(l, l), m) < 1e-9);
}

TEST_CASE("cholesky reports the failing pivot") {
    const Matrix indefinite{{1.0, 2.0}, {2.0, 1.0}};
    try {
        cholesky(indefinite);
        FAIL("expected NotPositiveDefinite");
    } catch (const NotPositiveDefinite& e) {
        CHECK(e.pivot() == 1);
    }
}

TEST_CASE("cholesky round-trips random s.p.d. matrices") {
    Rng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix m = random_spd(8, rng);
        const Matrix l = cholesky(m);
        CHECK(relative_gap(multiply_a_bt(l, l), m) < 1e-9);
    }
}

TEST_CASE("sym_eig on known 2x2 spectra") {
    const EigenResult diag = sym_eig(Matrix{{3.0, 0.0}, {0.0, 1.0}});
    CHECK(diag.values[0] == doctest::Approx(3.0));
    CHECK(diag.values[1] == doctest::Approx(1.0));
    CHECK(diag.vectors(0, 0) == doctest::Approx(1.0));
    CHECK(diag.vectors(1, 1) == doctest::Approx(1.0));

    const EigenResult swap = sym_eig(Matrix{{0.0, 1.0}, {1.0, 0.0}});
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(swap.values[0] == doctest::Approx(1.0));
    CHECK(swap.values[1] == doctest::Approx(-1.0));
    CHECK(swap.vectors(0, 0) == doctest::Approx(r));
    CHECK(swap.vectors(1, 0) == doctest::Approx(r));
    // Sign rule: the larger-magnitude entry is positive, tie broken low.
    CHECK(swap.vectors(0, 1) == doctest::Approx(r));
    CHECK(swap.vectors(1, 1) == doctest::Approx(-r));
}

TEST_CASE("sym_eig reconstructs random symmetric matrices") {
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix m = random_symmetric(6, rng);
        const EigenResult e = sym_eig(m);
        for (std::size_t j = 0; j + 1 < e.values.size(); ++j)
            CHECK(e.values[j] >= e.values[j + 1]);
        CHECK(relative_gap(reconstruct(e), m) < 1e-8);
        CHECK(max_off_identity(multiply_at_b(e.vectors, e.vectors)) < 1e-10);
    }
}

TEST_CASE("sym_eig is bit-identical across repeated calls") {
    Rng rng(41);
    const Matrix m = random_symmetric(7, rng);
    const EigenResult a = sym_eig(m);
    const EigenResult b = sym_eig(m);
    CHECK(a.values == b.values);
    CHECK(a.vectors == b.vectors);
}

TEST_CASE("sym_eig rejects asymmetric input") {
    CHECK_THROWS_AS(sym_eig(Matrix{{0.0, 1.0}, {0.0, 0.0}}), InvalidArgument);
}

TEST_CASE("generalized solve reduces to sym_eig for identity metric") {
    const Matrix a{{0.0, 1.0}, {1.0, 0.0}};
    const EigenResult e = generalized_sym_eig(a, Matrix::identity(2), 1);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(e.values.size() == 1);
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.vectors(0, 0) == doctest::Approx(r));
    CHECK(e.vectors(1, 0) == doctest::Approx(r));
}

TEST_CASE("generalized solve scaling law with M = 2I") {
    const Matrix a{{0.0, 1.0}, {1.0, 0.0}};
    const EigenResult e = generalized_sym_eig(a, 2.0 * Matrix::identity(2), 1);
    CHECK(e.values[0] == doctest::Approx(0.5));
    CHECK(e.vectors(0, 0) == doctest::Approx(0.5));  // vᵀMv = 1
    CHECK(e.vectors(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("generalized solve of the zero operator is deterministic") {
    Rng rng(51);
    const Matrix m = random_spd(4, rng);
    const Matrix zero(4, 4, 0.0);
    const EigenResult a = generalized_sym_eig(zero, m, 2);
    const EigenResult b = generalized_sym_eig(zero, m, 2);
    CHECK(a.values[0] == doctest::Approx(0.0));
    CHECK(a.values[1] == doctest::Approx(0.0));
    CHECK(a.values == b.values);
    CHECK(a.vectors == b.vectors);
}

TEST_CASE("generalized solve satisfies residual and M-orthonormality bounds") {
    Rng rng(61);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 9;
        const Matrix a = random_symmetric(n, rng);
        const Matrix m = random_spd(n, rng);
        const EigenResult e = generalized_sym_eig(a, m, n);

        const double scale_a = frobenius_norm(a);
        const double scale_m = frobenius_norm(m);
        for (std::size_t j = 0; j < n; ++j) {
            double residual = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double av = 0.0, mv = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    av += a(i, k) * e.vectors(k, j);
                    mv += m(i, k) * e.vectors(k, j);
                }
                const double r = av - e.values[j] * mv;
                residual += r * r;
            }
            residual = std::sqrt(residual);
            CHECK(residual <= 1e-6 * (scale_a + std::abs(e.values[j]) * scale_m));
        }

        const Matrix mtv = multiply(m, e.vectors);
        CHECK(max_off_identity(multiply_at_b(e.vectors, mtv)) < 1e-8);
    }
}

TEST_CASE("generalized eigenvalues scale linearly in A") {
    Rng rng(71);
    const Matrix a = random_symmetric(6, rng);
    const Matrix m = random_spd(6, rng);
    const double c = 3.7;
    const EigenResult base = generalized_sym_eig(a, m, 6);
    const EigenResult scaled = generalized_sym_eig(c * a, m, 6);
    const Matrix mv = multiply(m, base.vectors);
    for (std::size_t j = 0; j < 6; ++j) {
        // c > 0 keeps eigenvalue ranks aligned, so pairs match index-wise.
        CHECK(scaled.values[j] == doctest::Approx(c * base.values[j]).epsilon(1e-9));
        double dot = 0.0;
        for (std::size_t i = 0; i < 6; ++i) dot += scaled.vectors(i, j) * mv(i, j);
        CHECK(std::abs(std::abs(dot) - 1.0) < 1e-6);  // same M-unit direction
    }
}

TEST_CASE("pca recovers the diagonal of points on a line") {
    // Points on y = x: the single direction is (1,1)/√2 with positive signs.
    const FeatureMatrix pts{{-2.0, -1.0, 0.0, 1.0, 2.0}, {-2.0, -1.0, 0.0, 1.0, 2.0}};
    const PcaModel model = pca_fit(pts, 1);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK_FALSE(model.rank_deficient);
    CHECK(model.directions(0, 0) == doctest::Approx(r));
    CHECK(model.directions(1, 0) == doctest::Approx(r));

    // Projected coordinates are the signed distances along the line.
    const FeatureMatrix z = pca_transform(model, pts);
    CHECK(z.rows() == 1);
    CHECK(z(0, 0) == doctest::Approx(-2.0 * std::sqrt(2.0)));
    CHECK(z(0, 4) == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("pca transform of the mean is zero; full basis is an isometry") {
    Rng rng(81);
    const FeatureMatrix x = random_matrix(4, 12, rng);
    const PcaModel model = pca_fit(x, 4);

    FeatureMatrix mean_col(4, 1);
    for (std::size_t i = 0; i < 4; ++i) mean_col(i, 0) = model.mean[i];
    const FeatureMatrix z0 = pca_transform(model, mean_col);
    for (std::size_t i = 0; i < z0.rows(); ++i) CHECK(std::abs(z0(i, 0)) < 1e-12);

    const FeatureMatrix z = pca_transform(model, x);
    for (std::size_t a = 0; a < x.cols(); ++a)
        for (std::size_t b = a + 1; b < x.cols(); ++b) {
            double orig = 0.0, proj = 0.0;
            for (std::size_t i = 0; i < 4; ++i) {
                const double d = x(i, a) - x(i, b);
                orig += d * d;
            }
            for (std::size_t i = 0; i < z.rows(); ++i) {
                const double d = z(i, a) - z(i, b);
                proj += d * d;
            }
            CHECK(std::abs(std::sqrt(orig) - std::sqrt(proj)) < 1e-10);
        }
}

TEST_CASE("pca reconstruction error equals the discarded variance") {
    Rng rng(91);
    const FeatureMatrix x = random_matrix(5, 20, rng);
    const PcaModel model = pca_fit(x, 3);

    // Independent oracle: eigenvalues of the full covariance.
    FeatureMatrix centered = x;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double mu = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) mu += x(i, j);
        mu /= static_cast<double>(x.cols());
        for (std::size_t j = 0; j < x.cols(); ++j) centered(i, j) -= mu;
    }
    Matrix cov = multiply_a_bt(centered, centered);
    for (double& v : cov.flat()) v /= static_cast<double>(x.cols() - 1);
    const EigenResult full = sym_eig(cov);

    double discarded = 0.0;
    for (std::size_t j = 3; j < full.values.size(); ++j) discarded += full.values[j];

    // Explicit reconstruction through the 3 kept directions.
    const FeatureMatrix z = pca_transform(model, x);
    double error = 0.0;
    for (std::size_t jcol = 0; jcol < x.cols(); ++jcol)
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double rebuilt = model.mean[i];
            for (std::size_t k = 0; k < 3; ++k)
                rebuilt += model.directions(i, k) * z(k, jcol);
            const double d = x(i, jcol) - rebuilt;
            error += d * d;
        }
    error /= static_cast<double>(x.cols() - 1);
    CHECK(error == doctest::Approx(discarded).epsilon(1e-9));
}

TEST_CASE("pca flags rank deficiency instead of inventing directions") {
    // Rank-1 data in 3-D: only one positive-variance direction exists.
    FeatureMatrix x(3, 6);
    Rng rng(101);
    for (std::size_t j = 0; j < 6; ++j) {
        const double t = rng.next_gaussian();
        x(0, j) = t;
        x(1, j) = 2.0 * t;
        x(2, j) = -t;
    }
    const PcaModel model = pca_fit(x, 2);
    CHECK(model.rank_deficient);
    CHECK(model.directions.cols() == 1);
    CHECK(model.requested == 2);
}

TEST_CASE("pca is deterministic on a degenerate spectrum") {
    // Equilateral triangle: both covariance eigenvalues coincide.
    const double s = std::sqrt(3.0) / 2.0;
    const FeatureMatrix tri{{1.0, -0.5, -0.5}, {0.0, s, -s}};
    const PcaModel a = pca_fit(tri, 2);
    const PcaModel b = pca_fit(tri, 2);
    CHECK(a.directions == b.directions);
    CHECK(a.variances == b.variances);
    CHECK(max_off_identity(multiply_at_b(a.directions, a.directions)) < 1e-10);
}

TEST_CASE("pca on centered axis-aligned data recovers the axes") {
    // Variance 8 along x, 2 along y, uncorrelated.
    const FeatureMatrix x{{4.0, -4.0, 0.0, 0.0}, {0.0, 0.0, 2.0, -2.0}};
    const PcaModel model = pca_fit(x, 2);
    CHECK(std::abs(model.directions(0, 0) - 1.0) < 1e-8);
    CHECK(std::abs(model.directions(1, 0)) < 1e-8);
    CHECK(std::abs(model.directions(1, 1) - 1.0) < 1e-8);
    CHECK(model.variances[0] == doctest::Approx(32.0 / 3.0));
    CHECK(model.variances[1] == doctest::Approx(8.0 / 3.0));
}

TEST_CASE("pca rejects out-of-range component counts") {
    const FeatureMatrix x{{1.0, 2.0, 3.0}, {0.0, 1.0, 0.5}};
    CHECK_THROWS_AS(pca_fit(x, 0), InvalidArgument);
    CHECK_THROWS_AS(pca_fit(x, 3), InvalidArgument);  // k > cols-1
    const PcaModel model = pca_fit(x, 2);
    CHECK_THROWS_AS(pca_transform(model, FeatureMatrix(3, 1)), DimensionMismatch);
}
