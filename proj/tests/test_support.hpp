#pragma once

// Shared fixtures for the unit tests.

#include "graphdeconv/gsp.hpp"
#include "graphdeconv/synth.hpp"

#include <random>

namespace graphdeconv::testing {

/// The ER(N = 20, p = 0.4) fixture used across the suites.
inline Graph er_fixture(std::uint64_t seed = 7) { return gen_er_graph(20, 0.4, RngSeed(seed, {0})); }

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

inline Vector random_vector(Index n, std::mt19937_64& rng) { return random_matrix(n, 1, rng).col(0); }

inline Matrix random_symmetric(Index n, std::mt19937_64& rng) {
    const Matrix m = random_matrix(n, n, rng);
    return 0.5 * (m + m.transpose());
}

}  // namespace graphdeconv::testing
