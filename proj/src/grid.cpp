#include "hlab/grid.hpp"

#include "hlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hlab {

Point operator+(const Point &a, const Point &b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Point operator-(const Point &a, const Point &b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Point operator*(double s, const Point &a) { return {s * a[0], s * a[1], s * a[2]}; }

std::string to_string(Topology topology) { return topology == Topology::periodic ? "periodic" : "box"; }

Topology topology_from_string(const std::string &name) {
    if (name == "periodic" || name == "torus") {
        return Topology::periodic;
    }
    if (name == "box") {
        return Topology::box;
    }
    throw ConfigError("unknown topology '" + name + "' (expected periodic or box)");
}

GridSpec::GridSpec(int dim, std::array<double, 3> extent, std::array<int, 3> count, Topology topology)
    : dim_(dim), extent_(extent), count_(count), topology_(topology) {
    if (dim < 1 || dim > 3) {
        throw ConfigError("grid dimension must be 1, 2 or 3");
    }
    size_ = 1;
    for (int a = 0; a < 3; ++a) {
        if (a >= dim) {
            count_[a] = 1;
            extent_[a] = 0.0;
            spacing_[a] = 1.0;
            continue;
        }
        if (count_[a] < min_count) {
            throw ConfigError("grid node count must be >= 8 on every axis");
        }
        if (!(std::isfinite(extent_[a]) && extent_[a] > 0.0)) {
            throw ConfigError("grid extent must be positive and finite");
        }
        spacing_[a] = periodic() ? extent_[a] / count_[a] : extent_[a] / (count_[a] - 1);
        if (!(std::isfinite(spacing_[a]) && spacing_[a] > 0.0)) {
            throw ConfigError("grid spacing must be positive and finite");
        }
        size_ *= static_cast<std::size_t>(count_[a]);
    }
    stride_ = {1, static_cast<std::size_t>(count_[0]), static_cast<std::size_t>(count_[0]) * count_[1]};
}

GridSpec GridSpec::uniform(int dim, double extent, int count, Topology topology) {
    return GridSpec(dim, {extent, extent, extent}, {count, count, count}, topology);
}

double GridSpec::min_spacing() const { return *std::min_element(spacing_.begin(), spacing_.begin() + dim_); }
double GridSpec::max_spacing() const { return *std::max_element(spacing_.begin(), spacing_.begin() + dim_); }

double GridSpec::lower(int axis) const {
    if (axis >= dim_) {
        return 0.0;
    }
    return periodic() ? 0.0 : -0.5 * extent_[axis];
}

std::array<int, 3> GridSpec::unravel(std::size_t idx) const {
    std::array<int, 3> ijk{0, 0, 0};
    ijk[2] = static_cast<int>(idx / stride_[2]);
    idx -= stride_[2] * ijk[2];
    ijk[1] = static_cast<int>(idx / stride_[1]);
    ijk[0] = static_cast<int>(idx - stride_[1] * ijk[1]);
    return ijk;
}

Point GridSpec::node(std::size_t idx) const {
    const auto ijk = unravel(idx);
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) {
        p[a] = coord(a, ijk[a]);
    }
    return p;
}

bool GridSpec::interior(std::size_t idx, int layers) const {
    if (periodic() || layers <= 0) {
        return true;
    }
    const auto ijk = unravel(idx);
    for (int a = 0; a < dim_; ++a) {
        if (ijk[a] < layers || ijk[a] > count_[a] - 1 - layers) {
            return false;
        }
    }
    return true;
}

bool GridSpec::operator==(const GridSpec &other) const {
    return dim_ == other.dim_ && topology_ == other.topology_ && count_ == other.count_ && extent_ == other.extent_;
}

}  // namespace hlab
