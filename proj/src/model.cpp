#include "cdspp/model.hpp"

#include <algorithm>
#include <cmath>

#include "cdspp/errors.hpp"
#include "cdspp/linalg.hpp"

namespace cdspp {

namespace {

constexpr double kUnitTol = 1e-6;        // allowed column-norm deviation from 1
constexpr double kRankScale = 1e-10;     // eigenvalue floor, times the largest
constexpr double kRatioFloor = 1e-12;    // denominator floor for the ratio

void require_unit_columns(const FeatureMatrix& m) {
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (std::abs(column_norm(m, j) - 1.0) > kUnitTol) throw NotNormalized(j);
}

void require_domains(const FeatureMatrix& xs, const FeatureMatrix& xt) {
    if (xs.empty()) throw EmptyDomain("source");
    if (xt.empty()) throw EmptyDomain("target");
}

/// Embeds the four blocks into the stacked pencil:
///   A = [0 Sc; Scᵀ 0],  B = [Ss 0; 0 St].
std::pair<Matrix, Matrix> stack_blocks(const Matrix& sc, const Matrix& ss,
                                       const Matrix& st) {
    const std::size_t ds = ss.rows();
    const std::size_t dt = st.rows();
    Matrix a(ds + dt, ds + dt);
    Matrix b(ds + dt, ds + dt);
    for (std::size_t i = 0; i < ds; ++i)
        for (std::size_t j = 0; j < dt; ++j) {
            a(i, ds + j) = sc(i, j);
            a(ds + j, i) = sc(i, j);
        }
    for (std::size_t i = 0; i < ds; ++i)
        for (std::size_t j = 0; j < ds; ++j) b(i, j) = ss(i, j);
    for (std::size_t i = 0; i < dt; ++i)
        for (std::size_t j = 0; j < dt; ++j) b(ds + i, ds + j) = st(i, j);
    return {a, b};
}

Matrix symmetrized(Matrix m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j) {
            const double avg = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = avg;
            m(j, i) = avg;
        }
    return m;
}

int max_label(std::span<const int> labels) {
    int top = -1;
    for (const int y : labels) {
        if (y < 0) throw InvalidArgument("labels must be nonnegative");
        top = std::max(top, y);
    }
    return top;
}

/// tr(PsᵀXs·Ls·XsᵀPs) evaluated as <(PsᵀXs)·Ls, PsᵀXs>.
double quadratic_trace(const Matrix& projected, const Matrix& graph) {
    return frobenius_inner(multiply(projected, graph), projected);
}

/// tr(PtᵀXt·Wcᵀ·XsᵀPs) = <(PtᵀXt)·Wcᵀ, PsᵀXs>.
double cross_trace(const Matrix& zs, const Matrix& zt, const Matrix& wc) {
    return frobenius_inner(multiply_a_bt(zt, wc), zs);
}

void require_objective_shapes(const FeatureMatrix& xs, const FeatureMatrix& xt,
                              const GraphSet& graphs, const Matrix& ps,
                              const Matrix& pt) {
    if (ps.rows() != xs.rows() || pt.rows() != xt.rows() || ps.cols() != pt.cols())
        throw DimensionMismatch("objective: projection shapes do not match the data");
    if (graphs.ws.rows() != xs.cols() || graphs.wt.rows() != xt.cols() ||
        graphs.wc.rows() != xs.cols() || graphs.wc.cols() != xt.cols())
        throw DimensionMismatch("objective: graph sizes do not match the sample counts");
}

}  // namespace

std::pair<Matrix, Matrix> assemble_system(const FeatureMatrix& xs,
                                          const FeatureMatrix& xt,
                                          const GraphSet& graphs) {
    require_domains(xs, xt);
    if (graphs.ws.rows() != xs.cols() || graphs.wt.rows() != xt.cols() ||
        graphs.wc.rows() != xs.cols() || graphs.wc.cols() != xt.cols())
        throw DimensionMismatch("assemble_system: graph sizes do not match the data");
    require_unit_columns(xs);
    require_unit_columns(xt);

    const Matrix sc = multiply_a_bt(multiply(xs, graphs.wc), xt);
    const Matrix ss = symmetrized(multiply_a_bt(multiply(xs, graphs.ls), xs));
    const Matrix st = symmetrized(multiply_a_bt(multiply(xt, graphs.lt), xt));
    return stack_blocks(sc, ss, st);
}

std::pair<Matrix, Matrix> assemble_system(const FeatureMatrix& xs,
                                          const FeatureMatrix& xt,
                                          std::span<const int> src_labels,
                                          std::span<const int> tgt_labels) {
    require_domains(xs, xt);
    if (src_labels.size() != xs.cols() || tgt_labels.size() != xt.cols())
        throw DimensionMismatch("assemble_system: label counts do not match the data");
    require_unit_columns(xs);
    require_unit_columns(xt);

    const int top = std::max(max_label(src_labels), max_label(tgt_labels));
    const std::size_t classes = static_cast<std::size_t>(top) + 1;
    const std::size_t ds = xs.rows();
    const std::size_t dt = xt.rows();

    std::vector<double> count_s(classes, 0.0), count_t(classes, 0.0);
    for (const int y : src_labels) count_s[y] += 1.0;
    for (const int y : tgt_labels) count_t[y] += 1.0;

    // Per-class column sums: graph products collapse onto these.
    Matrix sums_s(ds, classes);
    for (std::size_t j = 0; j < xs.cols(); ++j)
        for (std::size_t i = 0; i < ds; ++i) sums_s(i, src_labels[j]) += xs(i, j);
    Matrix sums_t(dt, classes);
    for (std::size_t j = 0; j < xt.cols(); ++j)
        for (std::size_t i = 0; i < dt; ++i) sums_t(i, tgt_labels[j]) += xt(i, j);

    // Sc = Xs·Wc·Xtᵀ = Σ_c (class-c source sum)·(class-c target sum)ᵀ.
    const Matrix sc = multiply_a_bt(sums_s, sums_t);

    // Ss = Xs·Ls·Xsᵀ = Σ_i (|class_i in s| + ½|class_i in t|)·x_i·x_iᵀ − Σ_c s_c·s_cᵀ,
    // from Ls = Ds − Ws + ½Dcs with the class-clique degrees.
    Matrix ss(ds, ds);
    for (std::size_t j = 0; j < xs.cols(); ++j) {
        const double w = count_s[src_labels[j]] + 0.5 * count_t[src_labels[j]];
        for (std::size_t r = 0; r < ds; ++r) {
            const double xr = w * xs(r, j);
            for (std::size_t c = r; c < ds; ++c) ss(r, c) += xr * xs(c, j);
        }
    }
    Matrix st(dt, dt);
    for (std::size_t j = 0; j < xt.cols(); ++j) {
        const double w = count_t[tgt_labels[j]] + 0.5 * count_s[tgt_labels[j]];
        for (std::size_t r = 0; r < dt; ++r) {
            const double xr = w * xt(r, j);
            for (std::size_t c = r; c < dt; ++c) st(r, c) += xr * xt(c, j);
        }
    }
    const Matrix outer_s = multiply_a_bt(sums_s, sums_s);
    const Matrix outer_t = multiply_a_bt(sums_t, sums_t);
    for (std::size_t r = 0; r < ds; ++r)
        for (std::size_t c = r; c < ds; ++c) {
            ss(r, c) -= outer_s(r, c);
            ss(c, r) = ss(r, c);
        }
    for (std::size_t r = 0; r < dt; ++r)
        for (std::size_t c = r; c < dt; ++c) {
            st(r, c) -= outer_t(r, c);
            st(c, r) = st(r, c);
        }

    return stack_blocks(sc, ss, st);
}

ProjectionPair fit(const FeatureMatrix& xs, const FeatureMatrix& xt,
                   std::span<const int> src_labels, std::span<const int> tgt_labels,
                   const CdsppConfig& config) {
    require_domains(xs, xt);
    if (src_labels.size() != xs.cols() || tgt_labels.size() != xt.cols())
        throw DimensionMismatch("fit: label counts do not match the data");
    if (config.d < 1) throw InvalidArgument("fit: subspace dimension must be >= 1");
    if (!(config.alpha > 0.0)) throw InvalidArgument("fit: alpha must be positive");

    const int top = std::max(max_label(src_labels), max_label(tgt_labels));
    std::vector<bool> seen(static_cast<std::size_t>(top) + 1, false);
    for (const int y : src_labels) seen[y] = true;
    for (const int y : tgt_labels) seen[y] = true;
    for (std::size_t c = 0; c < seen.size(); ++c)
        if (!seen[c]) throw EmptyClass(static_cast<int>(c));

    const FeatureMatrix xs_unit = l2_normalize_columns(xs);
    const FeatureMatrix xt_unit = l2_normalize_columns(xt);

    const std::size_t ds = xs.rows();
    const std::size_t dt = xt.rows();

    ProjectionPair out;
    std::size_t d = config.d;
    if (d > ds + dt) {
        d = ds + dt;
        out.rank_warning = true;
    }

    auto [a, b] = assemble_system(xs_unit, xt_unit, src_labels, tgt_labels);
    for (std::size_t i = 0; i < b.rows(); ++i) b(i, i) += config.alpha;

    const EigenResult eig = generalized_sym_eig(a, b, d);

    const double lead = std::max(eig.values.front(), 0.0);
    const double floor = kRankScale * lead;
    std::size_t kept = 0;
    while (kept < d && eig.values[kept] > floor) ++kept;
    if (kept < d) out.rank_warning = true;

    out.eigenvalues.assign(eig.values.begin(), eig.values.begin() + kept);
    out.ps = Matrix(ds, kept);
    out.pt = Matrix(dt, kept);
    for (std::size_t j = 0; j < kept; ++j) {
        for (std::size_t i = 0; i < ds; ++i) out.ps(i, j) = eig.vectors(i, j);
        for (std::size_t i = 0; i < dt; ++i) out.pt(i, j) = eig.vectors(ds + i, j);
    }
    return out;
}

FeatureMatrix project(const Matrix& p, const FeatureMatrix& x) {
    if (p.rows() != x.rows())
        throw DimensionMismatch("project: projection and data dimensions differ");
    const FeatureMatrix unit = l2_normalize_columns(x);
    return l2_normalize_columns(multiply_at_b(p, unit));
}

double objective_sum_form(const FeatureMatrix& xs, const FeatureMatrix& xt,
                          const GraphSet& graphs, const Matrix& ps, const Matrix& pt) {
    require_objective_shapes(xs, xt, graphs, ps, pt);
    const Matrix zs = multiply_at_b(ps, xs);
    const Matrix zt = multiply_at_b(pt, xt);
    const std::size_t d = zs.rows();

    auto pair_gap = [d](const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
        double g = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = a(k, i) - b(k, j);
            g += diff * diff;
        }
        return g;
    };

    double sum = 0.0;
    for (std::size_t i = 0; i < zs.cols(); ++i)
        for (std::size_t j = 0; j < zs.cols(); ++j)
            if (graphs.ws(i, j) != 0.0) sum += graphs.ws(i, j) * pair_gap(zs, i, zs, j);
    for (std::size_t i = 0; i < zt.cols(); ++i)
        for (std::size_t j = 0; j < zt.cols(); ++j)
            if (graphs.wt(i, j) != 0.0) sum += graphs.wt(i, j) * pair_gap(zt, i, zt, j);
    for (std::size_t i = 0; i < zs.cols(); ++i)
        for (std::size_t j = 0; j < zt.cols(); ++j)
            if (graphs.wc(i, j) != 0.0) sum += graphs.wc(i, j) * pair_gap(zs, i, zt, j);
    return sum;
}

double objective_trace_form(const FeatureMatrix& xs, const FeatureMatrix& xt,
                            const GraphSet& graphs, const Matrix& ps, const Matrix& pt) {
    require_objective_shapes(xs, xt, graphs, ps, pt);
    const Matrix zs = multiply_at_b(ps, xs);
    const Matrix zt = multiply_at_b(pt, xt);
    // The within-domain pair sums expand to twice the Laplacian quadratic
    // forms, and the cross pair sum folds its squared terms into Ls, Lt
    // (the ½-degree diagonals) leaving twice the coupling trace.
    return 2.0 * quadratic_trace(zs, graphs.ls) + 2.0 * quadratic_trace(zt, graphs.lt) -
           2.0 * cross_trace(zs, zt, graphs.wc);
}

double objective_ratio(const FeatureMatrix& xs, const FeatureMatrix& xt,
                       const GraphSet& graphs, const Matrix& ps, const Matrix& pt,
                       double alpha) {
    require_objective_shapes(xs, xt, graphs, ps, pt);
    const Matrix zs = multiply_at_b(ps, xs);
    const Matrix zt = multiply_at_b(pt, xt);
    const double numerator = cross_trace(zs, zt, graphs.wc);
    double denominator = quadratic_trace(zs, graphs.ls) + quadratic_trace(zt, graphs.lt);
    if (alpha != 0.0) {
        const double fs = frobenius_norm(ps);
        const double ft = frobenius_norm(pt);
        denominator += alpha * (fs * fs + ft * ft);
    }
    if (denominator < kRatioFloor) throw DegenerateRatio();
    return numerator / denominator;
}

double lpp_objective(const FeatureMatrix& x, const Matrix& w, const Matrix& p) {
    if (p.rows() != x.rows())
        throw DimensionMismatch("lpp_objective: projection does not match the data");
    if (w.rows() != x.cols() || w.cols() != x.cols())
        throw DimensionMismatch("lpp_objective: graph size does not match the data");
    const Matrix z = multiply_at_b(p, x);
    double sum = 0.0;
    for (std::size_t i = 0; i < z.cols(); ++i)
        for (std::size_t j = 0; j < z.cols(); ++j) {
            if (w(i, j) == 0.0) continue;
            double gap = 0.0;
            for (std::size_t k = 0; k < z.rows(); ++k) {
                const double diff = z(k, i) - z(k, j);
                gap += diff * diff;
            }
            sum += w(i, j) * gap;
        }
    return sum;
}

}  // namespace cdspp
