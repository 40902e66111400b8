#ifndef CDSPP_MODEL_HPP
#define CDSPP_MODEL_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "cdspp/graphs.hpp"
#include "cdspp/matrix.hpp"

namespace cdspp {

struct CdsppConfig {
    std::size_t d = 0;           // subspace dimension; 0 means "resolve to the
                                 // class count" at the pipeline layer
    double alpha = 10.0;         // regularization weight on the metric block
    std::size_t iterations = 5;  // pseudo-labelling rounds (semi-supervised)
};

/// The learned pair of domain projections. Columns of the stacked [ps; pt]
/// are orthonormal in the (B + alpha*I) metric. rank_warning is set when the
/// usable spectrum was smaller than the requested dimension (columns dropped)
/// or the request exceeded d_s + d_t (clamped).
struct ProjectionPair {
    Matrix ps;  // d_s x d
    Matrix pt;  // d_t x d
    std::vector<double> eigenvalues;
    bool rank_warning = false;
};

/// Builds the pencil (A, B) of the coupled projection problem:
///   A = [ 0    Sc ]      B = [ Ss  0  ]      Sc = Xs·Wc·Xtᵀ
///       [ Scᵀ  0  ]          [ 0   St ]      Ss = Xs·Ls·Xsᵀ, St = Xt·Lt·Xtᵀ
/// Columns of Xs, Xt must already be unit-norm (NotNormalized otherwise;
/// the index refers to the offending matrix's own column numbering).
std::pair<Matrix, Matrix> assemble_system(const FeatureMatrix& xs,
                                          const FeatureMatrix& xt,
                                          const GraphSet& graphs);

/// Same pencil assembled from labels without materializing the n x n graphs:
/// grouping by class collapses every graph product to per-class sums, so the
/// cost is O(n·d²) instead of O(n²·d). Used by fit; the dense overload above
/// stays as the independent cross-check.
std::pair<Matrix, Matrix> assemble_system(const FeatureMatrix& xs,
                                          const FeatureMatrix& xt,
                                          std::span<const int> src_labels,
                                          std::span<const int> tgt_labels);

/// Learns the projection pair from raw (unnormalized) features: normalizes
/// columns, assembles the pencil, and keeps the top-d eigenvectors of
/// A·P = (B + alpha·I)·P·Λ. Eigenvalues at or below 1e-10 times the largest
/// are dropped (rank_warning). Every class label must occur in at least one
/// domain; each domain must be non-empty.
ProjectionPair fit(const FeatureMatrix& xs, const FeatureMatrix& xt,
                   std::span<const int> src_labels, std::span<const int> tgt_labels,
                   const CdsppConfig& config);

/// z = Pᵀ·x̂ with x̂ the l2-normalized column, then z is l2-normalized too,
/// so outputs live on the unit sphere of the subspace. ZeroColumn when a
/// sample is orthogonal to the subspace.
FeatureMatrix project(const Matrix& p, const FeatureMatrix& x);

/// Pairwise-difference objective evaluated by direct loops over sample pairs:
///   Σ_ij ‖Psᵀxs_i − Psᵀxs_j‖²·Ws_ij + Σ_ij ‖Ptᵀxt_i − Ptᵀxt_j‖²·Wt_ij
/// + Σ_ij ‖Psᵀxs_i − Ptᵀxt_j‖²·Wc_ij
double objective_sum_form(const FeatureMatrix& xs, const FeatureMatrix& xt,
                          const GraphSet& graphs, const Matrix& ps, const Matrix& pt);

/// The same objective in matrix form. The within-domain quadratic-form terms
/// each absorb a factor 2 from the pair expansion and the cross term keeps
/// its 2 explicitly:
///   2·tr(PsᵀSsPs) + 2·tr(PtᵀStPt) − 2·tr(PtᵀScᵀPs)
/// which matches objective_sum_form exactly, not just up to a constant.
double objective_trace_form(const FeatureMatrix& xs, const FeatureMatrix& xt,
                            const GraphSet& graphs, const Matrix& ps, const Matrix& pt);

/// Coupling ratio tr(PtᵀScᵀPs) / (tr(PsᵀSsPs) + tr(PtᵀStPt) + alpha·‖P‖²_F);
/// alpha defaults to 0 which is the plain trace ratio. DegenerateRatio when
/// the denominator falls below 1e-12.
double objective_ratio(const FeatureMatrix& xs, const FeatureMatrix& xt,
                       const GraphSet& graphs, const Matrix& ps, const Matrix& pt,
                       double alpha = 0.0);

/// Classic locality objective Σ_ij ‖Pᵀx_i − Pᵀx_j‖²·W_ij over one domain.
double lpp_objective(const FeatureMatrix& x, const Matrix& w, const Matrix& p);

}  // namespace cdspp

#endif  // CDSPP_MODEL_HPP
