#include "cdspp/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cdspp/errors.hpp"

namespace cdspp {

namespace {

constexpr double kUnitTol = 1e-6;
constexpr double kNormFloor = 1e-12;

void accumulate(const FeatureMatrix& z, std::span<const int> labels, std::size_t classes,
                Matrix& sums, std::vector<std::size_t>& support) {
    if (z.cols() != labels.size())
        throw DimensionMismatch("compute_class_means: label count does not match columns");
    for (std::size_t j = 0; j < z.cols(); ++j) {
        const int y = labels[j];
        if (y < 0 || static_cast<std::size_t>(y) >= classes)
            throw InvalidArgument("compute_class_means: label outside [0, C)");
        if (std::abs(column_norm(z, j) - 1.0) > kUnitTol) throw NotNormalized(j);
        for (std::size_t i = 0; i < z.rows(); ++i) sums(i, y) += z(i, j);
        ++support[y];
    }
}

}  // namespace

ClassMeans compute_class_means(const FeatureMatrix& zs, std::span<const int> src_labels,
                               const FeatureMatrix& zt, std::span<const int> tgt_labels,
                               std::size_t classes, bool strict) {
    if (classes < 1) throw InvalidArgument("compute_class_means: need at least one class");
    const bool have_s = !zs.empty();
    const bool have_t = !zt.empty();
    if (!have_s && !have_t)
        throw InvalidArgument("compute_class_means: no samples in either domain");
    if (have_s && have_t && zs.rows() != zt.rows())
        throw DimensionMismatch("compute_class_means: subspace dimensions differ");
    const std::size_t dim = have_s ? zs.rows() : zt.rows();

    ClassMeans out;
    out.means = Matrix(dim, classes);
    out.support.assign(classes, 0);
    out.absent.assign(classes, false);

    if (have_s) accumulate(zs, src_labels, classes, out.means, out.support);
    if (have_t) accumulate(zt, tgt_labels, classes, out.means, out.support);

    for (std::size_t c = 0; c < classes; ++c) {
        if (out.support[c] == 0) {
            if (strict) throw EmptyClass(static_cast<int>(c));
            out.absent[c] = true;
            continue;
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) norm += out.means(i, c) * out.means(i, c);
        norm = std::sqrt(norm);
        if (norm < kNormFloor) {
            // Samples cancelled out (e.g. antipodal pair): no usable direction.
            out.absent[c] = true;
            out.degenerate_warning = true;
            for (std::size_t i = 0; i < dim; ++i) out.means(i, c) = 0.0;
            continue;
        }
        for (std::size_t i = 0; i < dim; ++i) out.means(i, c) /= norm;
    }
    return out;
}

Prediction predict(const ClassMeans& means, std::span<const double> z) {
    if (z.size() != means.means.rows())
        throw DimensionMismatch("predict: sample dimension does not match the means");
    double norm = 0.0;
    for (const double v : z) norm += v * v;
    if (std::abs(std::sqrt(norm) - 1.0) > kUnitTol) throw NotNormalized(0);

    Prediction best;
    double runner_up = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t c = 0; c < means.means.cols(); ++c) {
        if (means.absent[c]) continue;
        double sq = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double diff = z[i] - means.means(i, c);
            sq += diff * diff;
        }
        const double distance = std::sqrt(sq);
        if (!found || distance < best.distance) {
            if (found) runner_up = best.distance;
            best.label = static_cast<int>(c);
            best.distance = distance;
            found = true;
        } else if (distance < runner_up) {
            runner_up = distance;
        }
    }
    if (!found) throw NoClasses();
    best.confidence = -best.distance;
    best.margin = runner_up - best.distance;
    return best;
}

std::vector<Prediction> predict_batch(const ClassMeans& means, const FeatureMatrix& z) {
    std::vector<Prediction> out;
    out.reserve(z.cols());
    for (std::size_t j = 0; j < z.cols(); ++j) out.push_back(predict(means, z.column(j)));
    return out;
}

std::vector<std::size_t> confidence_rank(std::span<const Prediction> predictions) {
    if (predictions.empty()) throw InvalidArgument("confidence_rank: no predictions");
    std::vector<std::size_t> order(predictions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (predictions[a].distance != predictions[b].distance)
            return predictions[a].distance < predictions[b].distance;
        if (predictions[a].margin != predictions[b].margin)
            return predictions[a].margin > predictions[b].margin;
        return a < b;
    });
    return order;
}

}  // namespace cdspp
