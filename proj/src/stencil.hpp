#pragma once

// 1D finite-difference weights shared by the parallel kernels, the reference
// kernels and the PDE steppers.

#include "hlab/grid.hpp"

#include <array>

namespace hlab::detail {

struct Stencil1D {
    int count = 0;
    std::array<int, 4> index{};  // absolute node index along the axis
    std::array<double, 4> weight{};
};

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

/// d/dx at axis position i.
inline Stencil1D first_derivative(const GridSpec &g, int axis, int i) {
    const int n = g.count(axis);
    const double h = g.spacing(axis);
    Stencil1D s;
    if (g.periodic()) {
        s.count = 2;
        s.index = {wrap(i - 1, n), wrap(i + 1, n), 0, 0};
        s.weight = {-0.5 / h, 0.5 / h, 0.0, 0.0};
    } else if (i == 0) {
        s.count = 3;
        s.index = {0, 1, 2, 0};
        s.weight = {-1.5 / h, 2.0 / h, -0.5 / h, 0.0};
    } else if (i == n - 1) {
        s.count = 3;
        s.index = {n - 1, n - 2, n - 3, 0};
        s.weight = {1.5 / h, -2.0 / h, 0.5 / h, 0.0};
    } else {
        s.count = 2;
        s.index = {i - 1, i + 1, 0, 0};
        s.weight = {-0.5 / h, 0.5 / h, 0.0, 0.0};
    }
    return s;
}

/// d2/dx2 at axis position i.
inline Stencil1D second_derivative(const GridSpec &g, int axis, int i) {
    const int n = g.count(axis);
    const double h2 = g.spacing(axis) * g.spacing(axis);
    Stencil1D s;
    if (g.periodic()) {
        s.count = 3;
        s.index = {wrap(i - 1, n), i, wrap(i + 1, n), 0};
        s.weight = {1.0 / h2, -2.0 / h2, 1.0 / h2, 0.0};
    } else if (i == 0) {
        s.count = 4;
        s.index = {0, 1, 2, 3};
        s.weight = {2.0 / h2, -5.0 / h2, 4.0 / h2, -1.0 / h2};
    } else if (i == n - 1) {
        s.count = 4;
        s.index = {n - 1, n - 2, n - 3, n - 4};
        s.weight = {2.0 / h2, -5.0 / h2, 4.0 / h2, -1.0 / h2};
    } else {
        s.count = 3;
        s.index = {i - 1, i, i + 1, 0};
        s.weight = {1.0 / h2, -2.0 / h2, 1.0 / h2, 0.0};
    }
    return s;
}

/// Trapezoid weight along one axis (1 on periodic axes).
inline double quadrature_weight(const GridSpec &g, int axis, int i) {
    if (g.periodic()) {
        return 1.0;
    }
    return (i == 0 || i == g.count(axis) - 1) ? 0.5 : 1.0;
}

}  // namespace hlab::detail
