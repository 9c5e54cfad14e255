#include "hlab/potentials.hpp"

#include "hlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hlab {

namespace {

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

// Wave vector of a trig term.
Point wave(const TrigTerm &t, int d) {
    Point w{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) {
        w[a] = 2.0 * std::numbers::pi * t.mode[a] / t.period[a];
    }
    return w;
}

double phase_of(const TrigTerm &t, const Point &x, int d) { return dot(wave(t, d), x) + t.phase; }

Point masked(const Point &x, int d) {
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) {
        p[a] = x[a];
    }
    return p;
}

}  // namespace

void PotentialSpec::check_dim() const {
    if (dim_ < 1 || dim_ > 3) {
        throw ConfigError("potential dimension must be 1, 2 or 3");
    }
}

PotentialSpec PotentialSpec::quadratic(int dim, double a, Point b, double c) {
    PotentialSpec p(dim);
    p.add(QuadraticTerm{a, b, c});
    return p;
}

PotentialSpec PotentialSpec::gaussian_bump(int dim, double amplitude, Point center, double width) {
    PotentialSpec p(dim);
    p.add(GaussianBumpTerm{amplitude, center, width});
    return p;
}

PotentialSpec PotentialSpec::trig(int dim, double amplitude, std::array<int, 3> mode, double phase,
                                  std::array<double, 3> period) {
    PotentialSpec p(dim);
    p.add(TrigTerm{amplitude, mode, phase, period});
    return p;
}

PotentialSpec &PotentialSpec::add(const PotentialTerm &term) {
    std::visit(overloaded{
                   [](const QuadraticTerm &q) {
                       if (!std::isfinite(q.a) || !std::isfinite(q.c) ||
                           !std::all_of(q.b.begin(), q.b.end(), [](double v) { return std::isfinite(v); })) {
                           throw ConfigError("quadratic coefficients must be finite");
                       }
                   },
                   [](const GaussianBumpTerm &g) {
                       if (!(g.width > 0.0) || !std::isfinite(g.width) || !std::isfinite(g.amplitude)) {
                           throw ConfigError("gaussian bump width must be > 0 and amplitude finite");
                       }
                   },
                   [](const TrigTerm &t) {
                       if (!std::isfinite(t.amplitude) || !std::isfinite(t.phase)) {
                           throw ConfigError("trig amplitude and phase must be finite");
                       }
                       for (double L : t.period) {
                           if (!(L > 0.0) || !std::isfinite(L)) {
                               throw ConfigError("trig period must be positive");
                           }
                       }
                   },
               },
               term);
    terms_.push_back(term);
    return *this;
}

PotentialSpec PotentialSpec::operator+(const PotentialSpec &other) const {
    if (other.dim_ != dim_) {
        throw ConfigError("cannot add potentials of different dimensions");
    }
    PotentialSpec out = *this;
    for (const auto &t : other.terms_) {
        out.terms_.push_back(t);
    }
    return out;
}

PotentialSpec PotentialSpec::scaled(double s) const {
    PotentialSpec out(dim_);
    for (const auto &term : terms_) {
        std::visit(overloaded{
                       [&](QuadraticTerm q) {
                           q.a *= s;
                           q.b = s * q.b;
                           q.c *= s;
                           out.terms_.emplace_back(q);
                       },
                       [&](GaussianBumpTerm g) {
                           g.amplitude *= s;
                           out.terms_.emplace_back(g);
                       },
                       [&](TrigTerm t) {
                           t.amplitude *= s;
                           out.terms_.emplace_back(t);
                       },
                   },
                   term);
    }
    return out;
}

bool PotentialSpec::is_zero() const {
    for (const auto &term : terms_) {
        const bool zero = std::visit(overloaded{
                                         [](const QuadraticTerm &q) {
                                             return q.a == 0.0 && q.c == 0.0 && q.b[0] == 0.0 && q.b[1] == 0.0 &&
                                                    q.b[2] == 0.0;
                                         },
                                         [](const GaussianBumpTerm &g) { return g.amplitude == 0.0; },
                                         [](const TrigTerm &t) { return t.amplitude == 0.0; },
                                     },
                                     term);
        if (!zero) {
            return false;
        }
    }
    return true;
}

bool PotentialSpec::is_quadratic() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const PotentialTerm &t) {
        if (std::holds_alternative<QuadraticTerm>(t)) {
            return true;
        }
        if (const auto *g = std::get_if<GaussianBumpTerm>(&t)) {
            return g->amplitude == 0.0;
        }
        return std::get<TrigTerm>(t).amplitude == 0.0;
    });
}

QuadraticTerm PotentialSpec::quadratic_part() const {
    QuadraticTerm sum;
    for (const auto &t : terms_) {
        if (const auto *q = std::get_if<QuadraticTerm>(&t)) {
            sum.a += q->a;
            sum.b = sum.b + q->b;
            sum.c += q->c;
        }
    }
    return sum;
}

void PotentialSpec::check_admissible(const GridSpec &grid) const {
    if (grid.dim() != dim_) {
        throw ConfigError("potential dimension " + std::to_string(dim_) + " does not match grid dimension " +
                          std::to_string(grid.dim()));
    }
    for (const auto &term : terms_) {
        std::visit(overloaded{
                       [&](const QuadraticTerm &q) {
                           const bool constant = q.a == 0.0 && q.b[0] == 0.0 && q.b[1] == 0.0 && q.b[2] == 0.0;
                           if (grid.periodic() && !constant) {
                               throw ConfigError("quadratic potential is not periodic; use a box grid");
                           }
                       },
                       [&](const GaussianBumpTerm &g) {
                           if (grid.periodic() && g.amplitude != 0.0) {
                               throw ConfigError("gaussian bump potential is not periodic; use a box grid");
                           }
                       },
                       [&](const TrigTerm &t) {
                           if (!grid.periodic()) {
                               throw ConfigError("trig potential is only valid on a periodic grid");
                           }
                           for (int a = 0; a < dim_; ++a) {
                               if (std::abs(t.period[a] - grid.extent(a)) > 1e-12 * grid.extent(a)) {
                                   throw ConfigError("trig period must equal the grid extent");
                               }
                           }
                       },
                   },
                   term);
    }
}

double PotentialSpec::value(const Point &xin) const {
    const Point x = masked(xin, dim_);
    double u = 0.0;
    for (const auto &term : terms_) {
        u += std::visit(overloaded{
                            [&](const QuadraticTerm &q) { return 0.5 * q.a * norm2(x) + dot(q.b, x) + q.c; },
                            [&](const GaussianBumpTerm &g) {
                                const Point z = x - masked(g.center, dim_);
                                return g.amplitude * std::exp(-norm2(z) / (2.0 * g.width * g.width));
                            },
                            [&](const TrigTerm &t) { return t.amplitude * std::cos(phase_of(t, x, dim_)); },
                        },
                        term);
    }
    return u;
}

Point PotentialSpec::gradient(const Point &xin) const {
    const Point x = masked(xin, dim_);
    Point g{0.0, 0.0, 0.0};
    for (const auto &term : terms_) {
        g = g + std::visit(overloaded{
                                [&](const QuadraticTerm &q) { return q.a * x + masked(q.b, dim_); },
                                [&](const GaussianBumpTerm &b) {
                                    const Point z = x - masked(b.center, dim_);
                                    const double w2 = b.width * b.width;
                                    const double v = b.amplitude * std::exp(-norm2(z) / (2.0 * w2));
                                    return (-v / w2) * z;
                                },
                                [&](const TrigTerm &t) {
                                    return (-t.amplitude * std::sin(phase_of(t, x, dim_))) * wave(t, dim_);
                                },
                            },
                            term);
    }
    return g;
}

Sym3 PotentialSpec::hessian(const Point &xin) const {
    const Point x = masked(xin, dim_);
    Sym3 h{};
    for (const auto &term : terms_) {
        std::visit(overloaded{
                       [&](const QuadraticTerm &q) {
                           for (int a = 0; a < dim_; ++a) {
                               h[sym_slot(a, a)] += q.a;
                           }
                       },
                       [&](const GaussianBumpTerm &b) {
                           const Point z = x - masked(b.center, dim_);
                           const double w2 = b.width * b.width;
                           const double v = b.amplitude * std::exp(-norm2(z) / (2.0 * w2));
                           for (int i = 0; i < dim_; ++i) {
                               for (int j = i; j < dim_; ++j) {
                                   h[sym_slot(i, j)] += v * (z[i] * z[j] / (w2 * w2) - (i == j ? 1.0 / w2 : 0.0));
                               }
                           }
                       },
                       [&](const TrigTerm &t) {
                           const Point w = wave(t, dim_);
                           const double c = -t.amplitude * std::cos(phase_of(t, x, dim_));
                           for (int i = 0; i < dim_; ++i) {
                               for (int j = i; j < dim_; ++j) {
                                   h[sym_slot(i, j)] += c * w[i] * w[j];
                               }
                           }
                       },
                   },
                   term);
    }
    return h;
}

double PotentialSpec::laplacian(const Point &xin) const {
    const Point x = masked(xin, dim_);
    double l = 0.0;
    for (const auto &term : terms_) {
        l += std::visit(overloaded{
                            [&](const QuadraticTerm &q) { return q.a * dim_; },
                            [&](const GaussianBumpTerm &b) {
                                const Point z = x - masked(b.center, dim_);
                                const double w2 = b.width * b.width;
                                const double v = b.amplitude * std::exp(-norm2(z) / (2.0 * w2));
                                return v * (norm2(z) / (w2 * w2) - dim_ / w2);
                            },
                            [&](const TrigTerm &t) {
                                return -t.amplitude * std::cos(phase_of(t, x, dim_)) * norm2(wave(t, dim_));
                            },
                        },
                        term);
    }
    return l;
}

Point PotentialSpec::grad_laplacian(const Point &xin) const {
    const Point x = masked(xin, dim_);
    Point g{0.0, 0.0, 0.0};
    for (const auto &term : terms_) {
        g = g + std::visit(overloaded{
                                [&](const QuadraticTerm &) { return Point{0.0, 0.0, 0.0}; },
                                [&](const GaussianBumpTerm &b) {
                                    const Point z = x - masked(b.center, dim_);
                                    const double w2 = b.width * b.width;
                                    const double r2 = norm2(z);
                                    const double v = b.amplitude * std::exp(-r2 / (2.0 * w2));
                                    return (v * (2.0 + dim_ - r2 / w2) / (w2 * w2)) * z;
                                },
                                [&](const TrigTerm &t) {
                                    const Point w = wave(t, dim_);
                                    return (t.amplitude * std::sin(phase_of(t, x, dim_)) * norm2(w)) * w;
                                },
                            },
                            term);
    }
    return g;
}

PotentialSpec PotentialSpec::laplacian_potential() const {
    PotentialSpec out(dim_);
    for (const auto &term : terms_) {
        std::visit(overloaded{
                       [&](const QuadraticTerm &q) { out.add(QuadraticTerm{0.0, {0.0, 0.0, 0.0}, q.a * dim_}); },
                       [&](const GaussianBumpTerm &b) {
                           if (b.amplitude != 0.0) {
                               throw ConfigError("the Laplacian of a gaussian bump is not a supported potential family");
                           }
                       },
                       [&](TrigTerm t) {
                           t.amplitude *= -norm2(wave(t, dim_));
                           out.add(t);
                       },
                   },
                   term);
    }
    return out;
}

ScalarField PotentialSpec::sample(const GridSpec &grid) const {
    return ScalarField::sample(grid, [&](const Point &x) { return value(x); });
}

ScalarField PotentialSpec::sample_laplacian(const GridSpec &grid) const {
    return ScalarField::sample(grid, [&](const Point &x) { return laplacian(x); });
}

VectorField PotentialSpec::sample_gradient(const GridSpec &grid) const {
    std::vector<double> v(grid.size() * grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point g = gradient(grid.node(i));
        for (int a = 0; a < grid.dim(); ++a) {
            v[i * grid.dim() + a] = g[a];
        }
    }
    return VectorField(grid, std::move(v));
}

SymmetricMatrixField PotentialSpec::sample_hessian(const GridSpec &grid) const {
    SymmetricMatrixField out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.set(i, hessian(grid.node(i)));
    }
    out.check_finite("potential hessian");
    return out;
}

std::string PotentialSpec::describe() const {
    if (terms_.empty()) {
        return "zero";
    }
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto &term : terms_) {
        if (!first) {
            os << " + ";
        }
        first = false;
        std::visit(overloaded{
                       [&](const QuadraticTerm &q) {
                           os << "quadratic(a=" << q.a << ", b=(" << q.b[0] << "," << q.b[1] << "," << q.b[2]
                              << "), c=" << q.c << ")";
                       },
                       [&](const GaussianBumpTerm &g) {
                           os << "gaussian_bump(amplitude=" << g.amplitude << ", center=(" << g.center[0] << ","
                              << g.center[1] << "," << g.center[2] << "), width=" << g.width << ")";
                       },
                       [&](const TrigTerm &t) {
                           os << "trig(amplitude=" << t.amplitude << ", mode=(" << t.mode[0] << "," << t.mode[1]
                              << "," << t.mode[2] << "), phase=" << t.phase << ")";
                       },
                   },
                   term);
    }
    return os.str();
}

double schrodinger_value(const PotentialSpec &u1, const PotentialSpec &u2, const Point &x) {
    const Point g = u1.gradient(x);
    return u1.laplacian(x) + 0.5 * norm2(g) - 2.0 * u2.value(x);
}

Point schrodinger_gradient(const PotentialSpec &u1, const PotentialSpec &u2, const Point &x) {
    const Point g = u1.gradient(x);
    const Sym3 h = u1.hessian(x);
    Point hg{0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            hg[i] += h[sym_slot(i, j)] * g[j];
        }
    }
    return u1.grad_laplacian(x) + hg - 2.0 * u2.gradient(x);
}

SchrodingerFields schrodinger_potential(const PotentialSpec &u1, const PotentialSpec &u2, const GridSpec &grid) {
    if (u1.dim() != grid.dim() || u2.dim() != grid.dim()) {
        throw std::invalid_argument("potential dimension does not match the grid");
    }
    SchrodingerFields out;
    out.V = ScalarField::sample(grid, [&](const Point &x) { return schrodinger_value(u1, u2, x); });
    std::vector<double> gv(grid.size() * grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point g = schrodinger_gradient(u1, u2, grid.node(i));
        for (int a = 0; a < grid.dim(); ++a) {
            gv[i * grid.dim() + a] = g[a];
        }
    }
    out.gradV = VectorField(grid, std::move(gv));

    const ScalarField lap_u2 = u2.sample_laplacian(grid);
    const SymmetricMatrixField hess_u2 = u2.sample_hessian(grid);
    if (u1.is_quadratic()) {
        // hess(Delta U1 + |grad U1|^2/2) = a^2 I for U1 = a|x|^2/2 + <b,x> + c
        const double a = u1.quadratic_part().a;
        out.lapV = ScalarField(grid, a * a * grid.dim()) - 2.0 * lap_u2;
        SymmetricMatrixField w(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (int d = 0; d < grid.dim(); ++d) {
                w.set(i, d, d, a * a);
            }
        }
        out.hessV = w + (-2.0) * hess_u2;
        out.analytic_second_derivatives = true;
    } else {
        const ScalarField w = ScalarField::sample(
            grid, [&](const Point &x) { return u1.laplacian(x) + 0.5 * norm2(u1.gradient(x)); });
        out.lapV = laplacian(w) - 2.0 * lap_u2;
        out.hessV = hessian(w) + (-2.0) * hess_u2;
        out.analytic_second_derivatives = false;
    }
    return out;
}

bool within_slack(double value, double bound) {
    return value <= bound + audit_slack * std::max({1.0, std::abs(bound), std::abs(value)});
}

HypothesisAudit audit_hypotheses(const PotentialSpec &u1, const PotentialSpec &u2, const GridSpec &grid, double k,
                                 int n, int layers) {
    if (!(k >= 0.0) || !std::isfinite(k)) {
        throw std::domain_error("audit requires k >= 0");
    }
    if (n < 1) {
        throw std::domain_error("audit requires n >= 1");
    }
    const SchrodingerFields s = schrodinger_potential(u1, u2, grid);
    HypothesisAudit audit;
    audit.k = k;
    audit.n = n;
    audit.sup_laplacian_V = sup_interior(s.lapV, layers);
    audit.sup_hessian_V = sup_interior(max_eigenvalue_field(s.hessV), layers);
    audit.inf_V = inf_interior(s.V, layers);
    double sup_grad = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.interior(i, layers)) {
            sup_grad = std::max(sup_grad, std::sqrt(norm2(s.gradV.at(i))));
        }
    }
    audit.sup_grad_V = sup_grad;
    audit.k_min_laplacian = std::sqrt(std::max(0.0, audit.sup_laplacian_V / n));
    audit.k_min_hessian = std::sqrt(std::max(0.0, audit.sup_hessian_V));
    audit.laplacian_ok = within_slack(audit.sup_laplacian_V, n * k * k);
    audit.hessian_ok = within_slack(audit.sup_hessian_V, k * k);
    audit.V_nonnegative = within_slack(-audit.inf_V, 0.0);
    return audit;
}

ComparisonAudit audit_comparison(const PotentialSpec &u1, const PotentialSpec &u2, const GridSpec &grid,
                                 int layers) {
    const ScalarField lap_u2 = u2.sample_laplacian(grid);
    const SymmetricMatrixField hess_u2 = u2.sample_hessian(grid);
    ScalarField lap_f(grid);
    SymmetricMatrixField hess_f(grid);
    if (u1.is_quadratic()) {
        const double a = u1.quadratic_part().a;
        SymmetricMatrixField q(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (int d = 0; d < grid.dim(); ++d) {
                q.set(i, d, d, -a * a);
            }
        }
        lap_f = lap_u2 + ScalarField(grid, -a * a * grid.dim());
        hess_f = hess_u2 + q;
    } else {
        const ScalarField half_sq = ScalarField::sample(grid, [&](const Point &x) { return 0.5 * norm2(u1.gradient(x)); });
        lap_f = lap_u2 - laplacian(half_sq);
        hess_f = hess_u2 + (-1.0) * hessian(half_sq);
    }
    ComparisonAudit out;
    out.inf_laplacian = inf_interior(lap_f, layers);
    out.inf_hessian = inf_interior(min_eigenvalue_field(hess_f), layers);
    return out;
}

double inf_laplacian(const PotentialSpec &u, const GridSpec &grid, int layers) {
    return inf_interior(u.sample_laplacian(grid), layers);
}

double inf_hessian_eigenvalue(const PotentialSpec &u, const GridSpec &grid, int layers) {
    return inf_interior(min_eigenvalue_field(u.sample_hessian(grid)), layers);
}

}  // namespace hlab
