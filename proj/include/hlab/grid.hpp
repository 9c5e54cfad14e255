#pragma once

#include <array>
#include <cstddef>
#include <string>

namespace hlab {

/// Point in R^d, d <= 3. Unused trailing components stay zero.
using Point = std::array<double, 3>;

inline double dot(const Point &a, const Point &b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Point &a) { return dot(a, a); }
Point operator+(const Point &a, const Point &b);
Point operator-(const Point &a, const Point &b);
Point operator*(double s, const Point &a);

enum class Topology { periodic, box };

std::string to_string(Topology topology);
Topology topology_from_string(const std::string &name);

/// Uniform tensor grid on a flat torus [0, L)^d or on a truncated box
/// [-L/2, L/2]^d centred at the origin.
class GridSpec {
  public:
    static constexpr int min_count = 8;

    GridSpec() = default;
    /// Validates: 1 <= dim <= 3, counts >= 8, extents positive and finite.
    GridSpec(int dim, std::array<double, 3> extent, std::array<int, 3> count, Topology topology);

    /// Same extent and count on every axis.
    static GridSpec uniform(int dim, double extent, int count, Topology topology);

    int dim() const { return dim_; }
    Topology topology() const { return topology_; }
    bool periodic() const { return topology_ == Topology::periodic; }
    double extent(int axis) const { return extent_[axis]; }
    int count(int axis) const { return count_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    double min_spacing() const;
    double max_spacing() const;
    double lower(int axis) const;

    std::size_t size() const { return size_; }
    std::size_t stride(int axis) const { return stride_[axis]; }

    std::size_t index(int i0, int i1 = 0, int i2 = 0) const {
        return static_cast<std::size_t>(i0) + stride_[1] * i1 + stride_[2] * i2;
    }
    std::array<int, 3> unravel(std::size_t idx) const;
    double coord(int axis, int i) const { return lower(axis) + spacing_[axis] * i; }
    Point node(std::size_t idx) const;

    /// True when the node is at least `layers` nodes away from every box face.
    bool interior(std::size_t idx, int layers) const;

    /// Number of grid lines orthogonal to axis 0 ("rows" for strip-parallel sweeps).
    std::size_t row_count() const { return size_ / count_[0]; }

    bool operator==(const GridSpec &other) const;
    bool operator!=(const GridSpec &other) const { return !(*this == other); }

  private:
    int dim_ = 1;
    std::array<double, 3> extent_{1.0, 1.0, 1.0};
    std::array<int, 3> count_{min_count, 1, 1};
    Topology topology_ = Topology::box;
    std::array<double, 3> spacing_{1.0, 1.0, 1.0};
    std::array<std::size_t, 3> stride_{1, 1, 1};
    std::size_t size_ = 0;
};

}  // namespace hlab
