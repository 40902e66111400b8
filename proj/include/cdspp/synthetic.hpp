#ifndef CDSPP_SYNTHETIC_HPP
#define CDSPP_SYNTHETIC_HPP

#include <cstdint>
#include <vector>

#include "cdspp/matrix.hpp"

namespace cdspp {

/// Seeded two-domain fixture: class centers sit on the unit circle of a 2-D
/// latent space, each sample jitters around its center, and two random linear
/// maps lift the latent points into feature spaces of different width before
/// per-coordinate noise is added. Heterogeneous by construction (the domains
/// share nothing but the latent geometry).
struct SyntheticSpec {
    std::size_t classes = 3;
    std::size_t source_dim = 20;
    std::size_t target_dim = 12;
    std::size_t source_per_class = 50;
    std::size_t target_per_class = 53;
    double latent_jitter = 0.15;
    double feature_noise = 0.05;
    std::uint64_t seed = 0;
};

struct DomainPair {
    FeatureMatrix source_features;
    std::vector<int> source_labels;
    FeatureMatrix target_features;
    std::vector<int> target_labels;
};

/// Columns are samples, class-major in generation order. Identical specs
/// produce identical pairs.
DomainPair generate_synthetic_pair(const SyntheticSpec& spec);

}  // namespace cdspp

#endif  // CDSPP_SYNTHETIC_HPP
