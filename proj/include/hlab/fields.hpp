#pragma once

#include "hlab/grid.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace hlab {

/// Grid-sampled real function. Values are checked finite on construction.
class ScalarField {
  public:
    ScalarField() = default;
    explicit ScalarField(const GridSpec &grid, double fill = 0.0);
    ScalarField(const GridSpec &grid, std::vector<double> values);

    static ScalarField sample(const GridSpec &grid, const std::function<double(const Point &)> &fn);

    const GridSpec &grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double &operator[](std::size_t i) { return values_[i]; }
    const std::vector<double> &values() const { return values_; }
    std::vector<double> &values() { return values_; }

    /// Throws NumericalError if any value is NaN or infinite.
    void check_finite(const char *what = "field") const;

  private:
    GridSpec grid_;
    std::vector<double> values_;
};

/// One d-vector per node, stored node-major (node * d + axis).
class VectorField {
  public:
    VectorField() = default;
    explicit VectorField(const GridSpec &grid);
    VectorField(const GridSpec &grid, std::vector<double> values);

    const GridSpec &grid() const { return grid_; }
    int dim() const { return grid_.dim(); }
    std::size_t nodes() const { return grid_.size(); }
    double operator()(std::size_t node, int axis) const { return values_[node * grid_.dim() + axis]; }
    double &operator()(std::size_t node, int axis) { return values_[node * grid_.dim() + axis]; }
    Point at(std::size_t node) const;
    const std::vector<double> &values() const { return values_; }

  private:
    GridSpec grid_;
    std::vector<double> values_;
};

/// Packed symmetric 3x3 matrix: xx, xy, xz, yy, yz, zz. Unused rows are zero.
using Sym3 = std::array<double, 6>;

inline int sym_slot(int i, int j) {
    if (i > j) {
        std::swap(i, j);
    }
    static constexpr int slot[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return slot[i][j];
}

/// Ascending eigenvalues of the leading d x d block, closed form.
std::array<double, 3> eigenvalues(const Sym3 &m, int d);

/// One symmetric d x d matrix per node, upper triangle only.
class SymmetricMatrixField {
  public:
    SymmetricMatrixField() = default;
    explicit SymmetricMatrixField(const GridSpec &grid);

    const GridSpec &grid() const { return grid_; }
    int dim() const { return grid_.dim(); }
    std::size_t nodes() const { return grid_.size(); }
    int entries_per_node() const { return per_node_; }

    double get(std::size_t node, int i, int j) const { return values_[node * per_node_ + packed(i, j)]; }
    void set(std::size_t node, int i, int j, double v) { values_[node * per_node_ + packed(i, j)] = v; }
    Sym3 at(std::size_t node) const;
    void set(std::size_t node, const Sym3 &m);
    const std::vector<double> &values() const { return values_; }

    void check_finite(const char *what = "matrix field") const;

  private:
    int packed(int i, int j) const;

    GridSpec grid_;
    int per_node_ = 1;
    std::vector<double> values_;
};

ScalarField operator+(const ScalarField &a, const ScalarField &b);
ScalarField operator-(const ScalarField &a, const ScalarField &b);
ScalarField operator*(double s, const ScalarField &a);
SymmetricMatrixField operator+(const SymmetricMatrixField &a, const SymmetricMatrixField &b);
SymmetricMatrixField operator*(double s, const SymmetricMatrixField &a);

/// Pointwise map. The result is checked finite.
ScalarField map(const ScalarField &f, const std::function<double(double)> &fn);

VectorField gradient(const ScalarField &f);
ScalarField laplacian(const ScalarField &f);
SymmetricMatrixField hessian(const ScalarField &f);

/// Node sum times cell volume (periodic) or tensor trapezoid (box).
/// Summation order is fixed: row partials first, then an ordered sum over rows.
double integrate(const ScalarField &f);

ScalarField min_eigenvalue_field(const SymmetricMatrixField &s);
ScalarField max_eigenvalue_field(const SymmetricMatrixField &s);
ScalarField trace_field(const SymmetricMatrixField &s);

/// Multilinear interpolation. Periodic axes wrap; box points must lie inside.
double interpolate(const ScalarField &f, const Point &x);

/// Extremes over nodes at least `layers` away from box faces.
double sup_interior(const ScalarField &f, int layers);
double inf_interior(const ScalarField &f, int layers);

}  // namespace hlab
