#ifndef CDSPP_GRAPHS_HPP
#define CDSPP_GRAPHS_HPP

#include <span>
#include <utility>

#include "cdspp/matrix.hpp"

namespace cdspp {

/// Class-consistency graphs for one source/target pairing and the two
/// Laplacian-like matrices derived from them. ls and lt satisfy, exactly,
///   ls = Ds - ws + 0.5*Dcs      Ds_ii  = Σ_j ws(i,j), Dcs_ii = Σ_j wc(i,j)
///   lt = Dt - wt + 0.5*Dct      Dt_jj  = Σ_i wt(i,j), Dct_jj = Σ_i wc(i,j)
struct GraphSet {
    Matrix ws;  // n_s x n_s, binary, unit diagonal
    Matrix wt;  // n_t x n_t, binary, unit diagonal
    Matrix wc;  // n_s x n_t, binary
    Matrix ls;  // n_s x n_s, symmetric PSD
    Matrix lt;  // n_t x n_t, symmetric PSD
};

/// w(i,j) = 1 iff labels[i] == labels[j]. The diagonal is therefore all ones;
/// the i == j terms cancel out of every downstream Laplacian expression.
Matrix build_within_similarity(std::span<const int> labels);

/// w(i,j) = 1 iff src_labels[i] == tgt_labels[j]; shape n_s x n_t.
Matrix build_cross_similarity(std::span<const int> src_labels,
                              std::span<const int> tgt_labels);

/// (ls, lt) from the degree formulas above. DimensionMismatch when wc does
/// not bridge ws and wt.
std::pair<Matrix, Matrix> build_laplacians(const Matrix& ws, const Matrix& wt,
                                           const Matrix& wc);

/// Convenience: all five matrices from the two label lists.
GraphSet build_graphs(std::span<const int> src_labels, std::span<const int> tgt_labels);

}  // namespace cdspp

#endif  // CDSPP_GRAPHS_HPP
