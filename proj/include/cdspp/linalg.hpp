#ifndef CDSPP_LINALG_HPP
#define CDSPP_LINALG_HPP

#include <cstddef>
#include <vector>

#include "cdspp/matrix.hpp"

namespace cdspp {

/// Eigenpairs sorted by descending eigenvalue; column j of vectors pairs with
/// values[j]. Each column's largest-magnitude entry is positive (ties broken
/// by lowest index), so repeated solves are bit-identical.
struct EigenResult {
    std::vector<double> values;
    Matrix vectors;
};

/// Principal-component model: per-dimension mean plus orthonormal directions
/// (columns of `directions`), ordered by descending explained variance.
/// rank_deficient is set when fewer positive-variance directions exist than
/// were requested; `directions` then holds only the available ones.
struct PcaModel {
    std::vector<double> mean;
    Matrix directions;
    std::vector<double> variances;
    std::size_t requested = 0;
    bool rank_deficient = false;
};

/// Scales every column to unit Euclidean norm. ZeroColumn if a norm < 1e-12.
FeatureMatrix l2_normalize_columns(const FeatureMatrix& m);

/// Lower-triangular L with L·Lᵀ = m. The pivot floor is 1e-12 · trace/n;
/// NotPositiveDefinite carries the first failing pivot index.
Matrix cholesky(const Matrix& m);

/// Full spectrum of a symmetric matrix (Householder tridiagonalization
/// followed by implicit-shift QL), descending, orthonormal columns.
EigenResult sym_eig(const Matrix& m);

/// Top-d pairs of A·v = λ·M·v for symmetric A and s.p.d. M, via Cholesky
/// reduction to a standard symmetric problem. Vectors are M-orthonormal.
EigenResult generalized_sym_eig(const Matrix& a, const Matrix& m, std::size_t d);

/// Fits k principal directions to the columns of m (covariance uses the n-1
/// denominator). Requires 1 ≤ k ≤ min(rows, cols-1).
PcaModel pca_fit(const FeatureMatrix& m, std::size_t k);

/// Projects columns of m onto the model: directionsᵀ · (column - mean).
FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& m);

}  // namespace cdspp

#endif  // CDSPP_LINALG_HPP
