#pragma once
// Shared generators for the property tests.

#include "hlab/fields.hpp"

#include <random>

namespace hlab::testing {

inline ScalarField random_field(const GridSpec &g, std::mt19937 &rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    ScalarField f(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = u(rng);
    }
    return f;
}

inline GridSpec random_grid(std::mt19937 &rng, Topology topo) {
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_int_distribution<int> count(8, 24);
    std::uniform_real_distribution<double> ext(0.5, 4.0);
    const int d = dim(rng);
    std::array<double, 3> e{1.0, 1.0, 1.0};
    std::array<int, 3> c{8, 1, 1};
    for (int a = 0; a < d; ++a) {
        e[a] = ext(rng);
        c[a] = count(rng);
    }
    return GridSpec(d, e, c, topo);
}

}  // namespace hlab::testing
