#include "cdspp/graphs.hpp"

#include "cdspp/errors.hpp"

namespace cdspp {

namespace {

void require_labels(std::span<const int> labels, const char* what) {
    if (labels.empty()) throw InvalidArgument(std::string(what) + ": no labels");
    for (const int y : labels)
        if (y < 0) throw InvalidArgument(std::string(what) + ": negative label");
}

}  // namespace

Matrix build_within_similarity(std::span<const int> labels) {
    require_labels(labels, "build_within_similarity");
    const std::size_t n = labels.size();
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w(i, j) = labels[i] == labels[j] ? 1.0 : 0.0;
    return w;
}

Matrix build_cross_similarity(std::span<const int> src_labels,
                              std::span<const int> tgt_labels) {
    require_labels(src_labels, "build_cross_similarity");
    require_labels(tgt_labels, "build_cross_similarity");
    Matrix w(src_labels.size(), tgt_labels.size());
    for (std::size_t i = 0; i < src_labels.size(); ++i)
        for (std::size_t j = 0; j < tgt_labels.size(); ++j)
            w(i, j) = src_labels[i] == tgt_labels[j] ? 1.0 : 0.0;
    return w;
}

std::pair<Matrix, Matrix> build_laplacians(const Matrix& ws, const Matrix& wt,
                                           const Matrix& wc) {
    if (ws.rows() != ws.cols() || wt.rows() != wt.cols())
        throw DimensionMismatch("build_laplacians: similarity matrices must be square");
    if (wc.rows() != ws.rows() || wc.cols() != wt.rows())
        throw DimensionMismatch("build_laplacians: cross matrix does not bridge the domains");

    const std::size_t ns = ws.rows();
    const std::size_t nt = wt.rows();

    Matrix ls(ns, ns);
    for (std::size_t i = 0; i < ns; ++i) {
        double degree = 0.0;
        for (std::size_t j = 0; j < ns; ++j) {
            degree += ws(i, j);
            ls(i, j) = -ws(i, j);
        }
        double cross = 0.0;
        for (std::size_t j = 0; j < nt; ++j) cross += wc(i, j);
        ls(i, i) += degree + 0.5 * cross;
    }

    Matrix lt(nt, nt);
    for (std::size_t j = 0; j < nt; ++j) {
        double degree = 0.0;
        for (std::size_t i = 0; i < nt; ++i) {
            degree += wt(i, j);
            lt(i, j) = -wt(i, j);
        }
        double cross = 0.0;
        for (std::size_t i = 0; i < ns; ++i) cross += wc(i, j);
        lt(j, j) += degree + 0.5 * cross;
    }

    return {ls, lt};
}

GraphSet build_graphs(std::span<const int> src_labels, std::span<const int> tgt_labels) {
    GraphSet g;
    g.ws = build_within_similarity(src_labels);
    g.wt = build_within_similarity(tgt_labels);
    g.wc = build_cross_similarity(src_labels, tgt_labels);
    auto [ls, lt] = build_laplacians(g.ws, g.wt, g.wc);
    g.ls = std::move(ls);
    g.lt = std::move(lt);
    return g;
}

}  // namespace cdspp
