#pragma once

#include <random>

#include "bosonperm/types.hpp"

namespace bosonperm::testing {

/// Entries with real and imaginary parts uniform in [-1, 1).
inline ComplexMatrix random_matrix(int n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = Complex(u(gen), u(gen));
    }
    return m;
}

inline double relative_error(Complex a, Complex b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace bosonperm::testing
