#include "hlab/reference.hpp"

#include "stencil.hpp"

namespace hlab::reference {

namespace {

double along(const ScalarField &f, std::array<int, 3> ijk, int axis, const detail::Stencil1D &s) {
    const GridSpec &g = f.grid();
    double acc = 0.0;
    for (int k = 0; k < s.count; ++k) {
        ijk[axis] = s.index[k];
        acc += s.weight[k] * f[g.index(ijk[0], ijk[1], ijk[2])];
    }
    return acc;
}

}  // namespace

VectorField gradient(const ScalarField &f) {
    const GridSpec &g = f.grid();
    VectorField out(g);
    for (std::size_t node = 0; node < g.size(); ++node) {
        const auto ijk = g.unravel(node);
        for (int a = 0; a < g.dim(); ++a) {
            out(node, a) = along(f, ijk, a, detail::first_derivative(g, a, ijk[a]));
        }
    }
    return out;
}

ScalarField laplacian(const ScalarField &f) {
    const GridSpec &g = f.grid();
    ScalarField out(g);
    for (std::size_t node = 0; node < g.size(); ++node) {
        const auto ijk = g.unravel(node);
        double acc = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            acc += along(f, ijk, a, detail::second_derivative(g, a, ijk[a]));
        }
        out[node] = acc;
    }
    return out;
}

SymmetricMatrixField hessian(const ScalarField &f) {
    const GridSpec &g = f.grid();
    SymmetricMatrixField out(g);
    for (std::size_t node = 0; node < g.size(); ++node) {
        const auto ijk = g.unravel(node);
        for (int a = 0; a < g.dim(); ++a) {
            out.set(node, a, a, along(f, ijk, a, detail::second_derivative(g, a, ijk[a])));
            for (int b = a + 1; b < g.dim(); ++b) {
                // d/dx_a of the d/dx_b stencil values
                const auto sa = detail::first_derivative(g, a, ijk[a]);
                double acc = 0.0;
                for (int p = 0; p < sa.count; ++p) {
                    auto shifted = ijk;
                    shifted[a] = sa.index[p];
                    acc += sa.weight[p] * along(f, shifted, b, detail::first_derivative(g, b, shifted[b]));
                }
                out.set(node, a, b, acc);
            }
        }
    }
    return out;
}

double integrate(const ScalarField &f) {
    const GridSpec &g = f.grid();
    double total = 0.0;
    for (std::size_t node = 0; node < g.size(); ++node) {
        const auto ijk = g.unravel(node);
        double w = 1.0;
        for (int a = 0; a < g.dim(); ++a) {
            w *= detail::quadrature_weight(g, a, ijk[a]) * g.spacing(a);
        }
        total += w * f[node];
    }
    return total;
}

void linear_rhs(const ScalarField &rho, const VectorField &drift, const ScalarField &reaction,
                std::vector<double> &out) {
    const GridSpec &g = rho.grid();
    out.assign(g.size(), 0.0);
    for (std::size_t node = 0; node < g.size(); ++node) {
        const auto ijk = g.unravel(node);
        double acc = reaction[node] * rho[node];
        for (int a = 0; a < g.dim(); ++a) {
            const int n = g.count(a);
            const double h = g.spacing(a);
            auto at = [&](int i) {
                auto q = ijk;
                q[a] = g.periodic() ? detail::wrap(i, n) : i;
                return rho[g.index(q[0], q[1], q[2])];
            };
            const int i = ijk[a];
            double fm, fp;
            if (g.periodic() || (i > 0 && i < n - 1)) {
                fm = at(i - 1);
                fp = at(i + 1);
            } else {
                // mirrored ghost node
                fm = fp = at(i == 0 ? 1 : n - 2);
            }
            acc += (fm - 2.0 * rho[node] + fp) / (h * h) + drift(node, a) * (fp - fm) / (2.0 * h);
        }
        out[node] = acc;
    }
}

}  // namespace hlab::reference
