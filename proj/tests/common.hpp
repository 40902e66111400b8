#ifndef CDSPP_TESTS_COMMON_HPP
#define CDSPP_TESTS_COMMON_HPP

#include <cstdint>

#include "cdspp/matrix.hpp"
#include "cdspp/rng.hpp"

namespace cdspp::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (double& x : m.flat()) x = rng.next_gaussian();
    return m;
}

inline Matrix random_symmetric(std::size_t n, Rng& rng) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double x = rng.next_gaussian();
            m(i, j) = x;
            m(j, i) = x;
        }
    return m;
}

/// B·Bᵀ plus a ridge, so the result is comfortably positive definite.
inline Matrix random_spd(std::size_t n, Rng& rng, double ridge = 0.5) {
    const Matrix b = random_matrix(n, n, rng);
    Matrix m = multiply_a_bt(b, b);
    for (std::size_t i = 0; i < n; ++i) m(i, i) += ridge;
    return m;
}

inline double relative_gap(const Matrix& actual, const Matrix& expected) {
    const double denom = frobenius_norm(expected);
    return frobenius_norm(actual - expected) / (denom > 0.0 ? denom : 1.0);
}

}  // namespace cdspp::testing

#endif  // CDSPP_TESTS_COMMON_HPP
