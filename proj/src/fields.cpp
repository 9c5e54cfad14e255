#include "hlab/fields.hpp"

#include "hlab/errors.hpp"
#include "stencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hlab {

using detail::first_derivative;
using detail::second_derivative;

ScalarField::ScalarField(const GridSpec &grid, double fill) : grid_(grid), values_(grid.size(), fill) {
    check_finite();
}

ScalarField::ScalarField(const GridSpec &grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw std::invalid_argument("scalar field value count does not match the grid");
    }
    check_finite();
}

ScalarField ScalarField::sample(const GridSpec &grid, const std::function<double(const Point &)> &fn) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = fn(grid.node(i));
    }
    return ScalarField(grid, std::move(v));
}

void ScalarField::check_finite(const char *what) const {
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw NumericalError(std::string(what) + " contains a non-finite value");
        }
    }
}

VectorField::VectorField(const GridSpec &grid) : grid_(grid), values_(grid.size() * grid.dim(), 0.0) {}

VectorField::VectorField(const GridSpec &grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size() * grid_.dim()) {
        throw std::invalid_argument("vector field component count does not match the grid");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw NumericalError("vector field contains a non-finite value");
        }
    }
}

Point VectorField::at(std::size_t node) const {
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < dim(); ++a) {
        p[a] = (*this)(node, a);
    }
    return p;
}

SymmetricMatrixField::SymmetricMatrixField(const GridSpec &grid)
    : grid_(grid), per_node_(grid.dim() * (grid.dim() + 1) / 2), values_(grid.size() * per_node_, 0.0) {}

int SymmetricMatrixField::packed(int i, int j) const {
    if (i > j) {
        std::swap(i, j);
    }
    // row-major upper triangle of a d x d matrix
    const int d = grid_.dim();
    return i * d - i * (i - 1) / 2 + (j - i);
}

Sym3 SymmetricMatrixField::at(std::size_t node) const {
    Sym3 m{};
    const int d = dim();
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            m[sym_slot(i, j)] = get(node, i, j);
        }
    }
    return m;
}

void SymmetricMatrixField::set(std::size_t node, const Sym3 &m) {
    const int d = dim();
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            set(node, i, j, m[sym_slot(i, j)]);
        }
    }
}

void SymmetricMatrixField::check_finite(const char *what) const {
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw NumericalError(std::string(what) + " contains a non-finite value");
        }
    }
}

std::array<double, 3> eigenvalues(const Sym3 &m, int d) {
    if (d == 1) {
        return {m[0], 0.0, 0.0};
    }
    if (d == 2) {
        const double mean = 0.5 * (m[0] + m[3]);
        const double r = std::hypot(0.5 * (m[0] - m[3]), m[1]);
        return {mean - r, mean + r, 0.0};
    }
    // Trigonometric solution of the characteristic cubic.
    const double a = m[0], b = m[3], c = m[5];
    const double p1 = m[1] * m[1] + m[2] * m[2] + m[4] * m[4];
    const double q = (a + b + c) / 3.0;
    const double p2 = (a - q) * (a - q) + (b - q) * (b - q) + (c - q) * (c - q) + 2.0 * p1;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::sqrt(p1)});
    if (p2 <= 1e-30 * scale * scale || p2 == 0.0) {
        return {q, q, q};
    }
    const double p = std::sqrt(p2 / 6.0);
    // B = (A - qI) / p
    const double b00 = (a - q) / p, b11 = (b - q) / p, b22 = (c - q) / p;
    const double b01 = m[1] / p, b02 = m[2] / p, b12 = m[4] / p;
    const double det = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) + b02 * (b01 * b12 - b11 * b02);
    const double r = std::clamp(0.5 * det, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double hi = q + 2.0 * p * std::cos(phi);
    const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double mid = 3.0 * q - hi - lo;
    return {lo, mid, hi};
}

namespace {

void require_same_grid(const GridSpec &a, const GridSpec &b) {
    if (a != b) {
        throw std::invalid_argument("fields live on different grids");
    }
}

// Stencil applied along `axis` at `node`.
inline double apply(const ScalarField &f, std::size_t node, int axis, int pos, const detail::Stencil1D &s) {
    const std::size_t stride = f.grid().stride(axis);
    const std::size_t base = node - stride * pos;
    double acc = 0.0;
    for (int k = 0; k < s.count; ++k) {
        acc += s.weight[k] * f[base + stride * s.index[k]];
    }
    return acc;
}

}  // namespace

ScalarField operator+(const ScalarField &a, const ScalarField &b) {
    require_same_grid(a.grid(), b.grid());
    ScalarField out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + b[i];
    }
    return out;
}

ScalarField operator-(const ScalarField &a, const ScalarField &b) {
    require_same_grid(a.grid(), b.grid());
    ScalarField out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] - b[i];
    }
    return out;
}

ScalarField operator*(double s, const ScalarField &a) {
    ScalarField out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = s * a[i];
    }
    return out;
}

SymmetricMatrixField operator+(const SymmetricMatrixField &a, const SymmetricMatrixField &b) {
    require_same_grid(a.grid(), b.grid());
    SymmetricMatrixField out(a.grid());
    const int d = a.dim();
    for (std::size_t n = 0; n < a.nodes(); ++n) {
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                out.set(n, i, j, a.get(n, i, j) + b.get(n, i, j));
            }
        }
    }
    return out;
}

SymmetricMatrixField operator*(double s, const SymmetricMatrixField &a) {
    SymmetricMatrixField out(a.grid());
    const int d = a.dim();
    for (std::size_t n = 0; n < a.nodes(); ++n) {
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                out.set(n, i, j, s * a.get(n, i, j));
            }
        }
    }
    return out;
}

ScalarField map(const ScalarField &f, const std::function<double(double)> &fn) {
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = fn(f[i]);
    }
    return ScalarField(f.grid(), std::move(v));
}

VectorField gradient(const ScalarField &f) {
    const GridSpec &g = f.grid();
    const int d = g.dim();
    std::vector<double> out(g.size() * d);
    const auto n = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
    for (long long node = 0; node < n; ++node) {
        const auto ijk = g.unravel(static_cast<std::size_t>(node));
        for (int a = 0; a < d; ++a) {
            out[node * d + a] = apply(f, node, a, ijk[a], first_derivative(g, a, ijk[a]));
        }
    }
    return VectorField(g, std::move(out));
}

ScalarField laplacian(const ScalarField &f) {
    const GridSpec &g = f.grid();
    const int d = g.dim();
    std::vector<double> out(g.size());
    const auto n = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
    for (long long node = 0; node < n; ++node) {
        const auto ijk = g.unravel(static_cast<std::size_t>(node));
        double acc = 0.0;
        for (int a = 0; a < d; ++a) {
            acc += apply(f, node, a, ijk[a], second_derivative(g, a, ijk[a]));
        }
        out[node] = acc;
    }
    return ScalarField(g, std::move(out));
}

SymmetricMatrixField hessian(const ScalarField &f) {
    const GridSpec &g = f.grid();
    const int d = g.dim();
    SymmetricMatrixField out(g);
    const auto n = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
    for (long long node = 0; node < n; ++node) {
        const auto ijk = g.unravel(static_cast<std::size_t>(node));
        for (int a = 0; a < d; ++a) {
            out.set(node, a, a, apply(f, node, a, ijk[a], second_derivative(g, a, ijk[a])));
            const auto sa = first_derivative(g, a, ijk[a]);
            for (int b = a + 1; b < d; ++b) {
                const auto sb = first_derivative(g, b, ijk[b]);
                const std::size_t base = node - g.stride(a) * ijk[a] - g.stride(b) * ijk[b];
                double acc = 0.0;
                for (int p = 0; p < sa.count; ++p) {
                    for (int q = 0; q < sb.count; ++q) {
                        acc += sa.weight[p] * sb.weight[q] * f[base + g.stride(a) * sa.index[p] + g.stride(b) * sb.index[q]];
                    }
                }
                out.set(node, a, b, acc);
            }
        }
    }
    out.check_finite("hessian");
    return out;
}

double integrate(const ScalarField &f) {
    const GridSpec &g = f.grid();
    const int n0 = g.count(0);
    const auto rows = static_cast<long long>(g.row_count());
    std::vector<double> partial(rows);
#pragma omp parallel for schedule(static)
    for (long long r = 0; r < rows; ++r) {
        const std::size_t base = static_cast<std::size_t>(r) * n0;
        const auto ijk = g.unravel(base);
        double w_row = 1.0;
        for (int a = 1; a < g.dim(); ++a) {
            w_row *= detail::quadrature_weight(g, a, ijk[a]);
        }
        double acc = 0.0;
        for (int i = 0; i < n0; ++i) {
            acc += detail::quadrature_weight(g, 0, i) * f[base + i];
        }
        partial[r] = w_row * acc;
    }
    double total = 0.0;
    for (double p : partial) {
        total += p;
    }
    double cell = 1.0;
    for (int a = 0; a < g.dim(); ++a) {
        cell *= g.spacing(a);
    }
    return total * cell;
}

namespace {

ScalarField eigen_pick(const SymmetricMatrixField &s, int which) {
    const GridSpec &g = s.grid();
    std::vector<double> out(g.size());
    const int d = g.dim();
    const auto n = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
    for (long long node = 0; node < n; ++node) {
        const auto ev = eigenvalues(s.at(node), d);
        out[node] = which < 0 ? ev[0] : ev[d - 1];
    }
    return ScalarField(g, std::move(out));
}

}  // namespace

ScalarField min_eigenvalue_field(const SymmetricMatrixField &s) { return eigen_pick(s, -1); }
ScalarField max_eigenvalue_field(const SymmetricMatrixField &s) { return eigen_pick(s, 1); }

ScalarField trace_field(const SymmetricMatrixField &s) {
    ScalarField out(s.grid());
    for (std::size_t n = 0; n < s.nodes(); ++n) {
        double acc = 0.0;
        for (int a = 0; a < s.dim(); ++a) {
            acc += s.get(n, a, a);
        }
        out[n] = acc;
    }
    return out;
}

double interpolate(const ScalarField &f, const Point &x) {
    const GridSpec &g = f.grid();
    const int d = g.dim();
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) {
        const int n = g.count(a);
        double u = (x[a] - g.lower(a)) / g.spacing(a);
        if (!std::isfinite(u)) {
            throw std::domain_error("interpolation point is not finite");
        }
        if (g.periodic()) {
            const double fl = std::floor(u);
            frac[a] = u - fl;
            lo[a] = detail::wrap(static_cast<int>(static_cast<long long>(fl) % n), n);
            hi[a] = detail::wrap(lo[a] + 1, n);
        } else {
            const double tol = 1e-9;
            if (u < -tol || u > (n - 1) + tol) {
                throw std::domain_error("interpolation point lies outside the box grid");
            }
            u = std::clamp(u, 0.0, static_cast<double>(n - 1));
            lo[a] = std::min(static_cast<int>(std::floor(u)), n - 2);
            hi[a] = lo[a] + 1;
            frac[a] = u - lo[a];
        }
    }
    double acc = 0.0;
    const int corners = 1 << d;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::array<int, 3> ijk{0, 0, 0};
        for (int a = 0; a < d; ++a) {
            const bool up = (c >> a) & 1;
            ijk[a] = up ? hi[a] : lo[a];
            w *= up ? frac[a] : 1.0 - frac[a];
        }
        acc += w * f[g.index(ijk[0], ijk[1], ijk[2])];
    }
    return acc;
}

double sup_interior(const ScalarField &f, int layers) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f.grid().interior(i, layers)) {
            best = std::max(best, f[i]);
        }
    }
    return best;
}

double inf_interior(const ScalarField &f, int layers) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f.grid().interior(i, layers)) {
            best = std::min(best, f[i]);
        }
    }
    return best;
}

}  // namespace hlab
