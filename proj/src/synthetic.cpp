#include "cdspp/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "cdspp/errors.hpp"
#include "cdspp/rng.hpp"

namespace cdspp {

namespace {

Matrix random_map(std::size_t rows, Rng& rng) {
    Matrix out(rows, 2);
    for (std::size_t i = 0; i < rows; ++i) {
        out(i, 0) = rng.next_gaussian();
        out(i, 1) = rng.next_gaussian();
    }
    return out;
}

void fill_domain(FeatureMatrix& features, std::vector<int>& labels, const Matrix& map,
                 const SyntheticSpec& spec, std::size_t per_class, Rng& rng) {
    std::size_t column = 0;
    for (std::size_t c = 0; c < spec.classes; ++c) {
        const double angle =
            2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(spec.classes);
        const double cx = std::cos(angle);
        const double cy = std::sin(angle);
        for (std::size_t j = 0; j < per_class; ++j, ++column) {
            const double lx = cx + spec.latent_jitter * rng.next_gaussian();
            const double ly = cy + spec.latent_jitter * rng.next_gaussian();
            for (std::size_t i = 0; i < features.rows(); ++i) {
                features(i, column) = map(i, 0) * lx + map(i, 1) * ly +
                                      spec.feature_noise * rng.next_gaussian();
            }
            labels.push_back(static_cast<int>(c));
        }
    }
}

}  // namespace

DomainPair generate_synthetic_pair(const SyntheticSpec& spec) {
    if (spec.classes == 0 || spec.source_dim == 0 || spec.target_dim == 0 ||
        spec.source_per_class == 0 || spec.target_per_class == 0) {
        throw InvalidArgument("synthetic spec needs positive classes, dims, and counts");
    }

    Rng rng(spec.seed);
    const Matrix source_map = random_map(spec.source_dim, rng);
    const Matrix target_map = random_map(spec.target_dim, rng);

    DomainPair pair;
    pair.source_features = FeatureMatrix(spec.source_dim, spec.classes * spec.source_per_class);
    pair.target_features = FeatureMatrix(spec.target_dim, spec.classes * spec.target_per_class);
    pair.source_labels.reserve(spec.classes * spec.source_per_class);
    pair.target_labels.reserve(spec.classes * spec.target_per_class);
    fill_domain(pair.source_features, pair.source_labels, source_map, spec,
                spec.source_per_class, rng);
    fill_domain(pair.target_features, pair.target_labels, target_map, spec,
                spec.target_per_class, rng);
    return pair;
}

}  // namespace cdspp
