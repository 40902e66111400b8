#ifndef CDSPP_CLASSIFY_HPP
#define CDSPP_CLASSIFY_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "cdspp/matrix.hpp"

namespace cdspp {

/// Per-class mean directions in the shared subspace. Column c of `means` is
/// the l2-normalized mean of every projected labelled sample with label c,
/// pooled across both domains. A class with no samples, or whose samples
/// cancel to a (near-)zero mean, is marked absent and never predicted;
/// degenerate_warning records the latter case.
struct ClassMeans {
    Matrix means;                      // d x C
    std::vector<std::size_t> support;  // contributing sample count per class
    std::vector<bool> absent;
    bool degenerate_warning = false;
};

struct Prediction {
    int label = -1;
    double distance = 0.0;    // Euclidean distance to the winning mean
    double confidence = 0.0;  // -distance
    double margin = 0.0;      // runner-up distance minus winner distance
};

/// Pools projected source and labelled target columns by class. Inputs must
/// be unit-norm (the projection step guarantees this). With strict true, a
/// class with no samples in either domain raises EmptyClass; otherwise it is
/// marked absent.
ClassMeans compute_class_means(const FeatureMatrix& zs, std::span<const int> src_labels,
                               const FeatureMatrix& zt, std::span<const int> tgt_labels,
                               std::size_t classes, bool strict = false);

/// Nearest-mean decision over non-absent classes, ties to the lowest class
/// index. The margin is +infinity when only one class is available.
Prediction predict(const ClassMeans& means, std::span<const double> z);

/// Predicts every column of z, in column order.
std::vector<Prediction> predict_batch(const ClassMeans& means, const FeatureMatrix& z);

/// Indices of predictions ordered most-confident first: ascending distance,
/// ties by descending margin, then ascending index.
std::vector<std::size_t> confidence_rank(std::span<const Prediction> predictions);

}  // namespace cdspp

#endif  // CDSPP_CLASSIFY_HPP
