#include "hlab/pde.hpp"

#include "hlab/closed_forms.hpp"
#include "hlab/errors.hpp"
#include "stencil.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace hlab {

std::string to_string(Scheme scheme) { return scheme == Scheme::imex ? "imex" : "explicit"; }

Scheme scheme_from_string(const std::string &name) {
    if (name == "explicit") {
        return Scheme::explicit_euler;
    }
    if (name == "imex") {
        return Scheme::imex;
    }
    throw ConfigError("unknown scheme '" + name + "' (expected explicit or imex)");
}

std::string to_string(Equation equation) { return equation == Equation::linear ? "linear" : "porous_medium"; }

bool Trajectory::has(double t) const {
    return std::any_of(snapshots.begin(), snapshots.end(), [&](const Snapshot &s) {
        return std::abs(s.time - t) <= 1e-12 * std::max(1.0, std::abs(t));
    });
}

const ScalarField &Trajectory::at(double t) const {
    for (const auto &s : snapshots) {
        if (std::abs(s.time - t) <= 1e-12 * std::max(1.0, std::abs(t))) {
            return s.field;
        }
    }
    throw std::out_of_range("no snapshot at t = " + std::to_string(t));
}

double explicit_dt_limit(const GridSpec &grid) {
    double s = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
        s += 1.0 / (grid.spacing(a) * grid.spacing(a));
    }
    return 0.25 / s;
}

Point displacement(const GridSpec &grid, const Point &x, const Point &x0) {
    Point z = x - x0;
    if (grid.periodic()) {
        for (int a = 0; a < grid.dim(); ++a) {
            const double L = grid.extent(a);
            z[a] -= L * std::round(z[a] / L);
        }
    }
    return z;
}

namespace {

// Second difference and central first difference along one axis with
// homogeneous Neumann faces (ghost node mirrors the first interior node).
struct AxisDiff {
    double second;
    double first;
};

inline AxisDiff neumann_diff(const double *f, std::size_t node, std::size_t stride, int i, int n, bool periodic,
                             double h) {
    const double inv_h2 = 1.0 / (h * h);
    const double f0 = f[node];
    if (periodic) {
        const double fm = f[i == 0 ? node + stride * (n - 1) : node - stride];
        const double fp = f[i == n - 1 ? node - stride * (n - 1) : node + stride];
        return {(fm - 2.0 * f0 + fp) * inv_h2, (fp - fm) / (2.0 * h)};
    }
    if (i == 0) {
        return {2.0 * (f[node + stride] - f0) * inv_h2, 0.0};
    }
    if (i == n - 1) {
        return {2.0 * (f[node - stride] - f0) * inv_h2, 0.0};
    }
    const double fm = f[node - stride];
    const double fp = f[node + stride];
    return {(fm - 2.0 * f0 + fp) * inv_h2, (fp - fm) / (2.0 * h)};
}

void neumann_laplacian(const GridSpec &g, const std::vector<double> &f, std::vector<double> &out) {
    out.resize(g.size());
    const int d = g.dim();
    const auto n = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
    for (long long node = 0; node < n; ++node) {
        const auto ijk = g.unravel(node);
        double acc = 0.0;
        for (int a = 0; a < d; ++a) {
            acc += neumann_diff(f.data(), node, g.stride(a), ijk[a], g.count(a), g.periodic(), g.spacing(a)).second;
        }
        out[node] = acc;
    }
}

// Trapezoid weights: 1/2 per box face the node sits on. W * Delta_h is symmetric.
std::vector<double> face_weights(const GridSpec &g) {
    std::vector<double> w(g.size(), 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto ijk = g.unravel(i);
        for (int a = 0; a < g.dim(); ++a) {
            w[i] *= detail::quadrature_weight(g, a, ijk[a]);
        }
    }
    return w;
}

double weighted_dot(const std::vector<double> &w, const std::vector<double> &a, const std::vector<double> &b) {
    const auto n = static_cast<long long>(a.size());
    // Fixed-size blocks summed in order keep the result independent of the thread count.
    constexpr long long block = 4096;
    const long long nb = (n + block - 1) / block;
    std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (long long bi = 0; bi < nb; ++bi) {
        double acc = 0.0;
        const long long end = std::min(n, (bi + 1) * block);
        for (long long i = bi * block; i < end; ++i) {
            acc += w[i] * a[i] * b[i];
        }
        partial[bi] = acc;
    }
    double total = 0.0;
    for (double p : partial) {
        total += p;
    }
    return total;
}

// Solves (I - c Delta_h) x = b by conjugate gradients in the W inner product.
void solve_shifted_laplacian(const GridSpec &g, const std::vector<double> &w, double c, const std::vector<double> &b,
                             std::vector<double> &x) {
    const std::size_t n = b.size();
    std::vector<double> lap, r(n), p(n), ap(n);
    auto apply = [&](const std::vector<double> &v, std::vector<double> &out) {
        neumann_laplacian(g, v, lap);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = v[i] - c * lap[i];
        }
    };
    apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = b[i] - ap[i];
    }
    p = r;
    const double bnorm = std::sqrt(weighted_dot(w, b, b));
    const double target = 1e-10 * std::max(bnorm, std::numeric_limits<double>::min());
    double rr = weighted_dot(w, r, r);
    double best = std::sqrt(rr);
    int since_best = 0;
    constexpr int max_iter = 5000;
    for (int it = 0; it < max_iter; ++it) {
        const double rnorm = std::sqrt(rr);
        if (rnorm <= target) {
            return;
        }
        if (rnorm < best * 0.999) {
            best = rnorm;
            since_best = 0;
        } else if (++since_best > 50) {
            throw NumericalError("conjugate gradient stagnated at relative residual " +
                                 std::to_string(rnorm / bnorm));
        }
        apply(p, ap);
        const double pap = weighted_dot(w, p, ap);
        if (!(pap > 0.0)) {
            throw NumericalError("conjugate gradient lost positive definiteness");
        }
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_new = weighted_dot(w, r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = r[i] + beta * p[i];
        }
    }
    throw NumericalError("conjugate gradient did not converge");
}

std::vector<double> output_times(const SolverConfig &cfg) {
    if (!(cfg.t_end > cfg.t_start)) {
        throw ConfigError("solver requires t_end > t_start");
    }
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
        throw ConfigError("solver requires dt > 0");
    }
    if (!(cfg.floor >= 0.0)) {
        throw ConfigError("positivity floor must be >= 0");
    }
    std::set<double> times;
    for (double t : cfg.snapshot_times) {
        if (!(t > cfg.t_start) || t > cfg.t_end) {
            throw ConfigError("snapshot time " + std::to_string(t) + " outside (t_start, t_end]");
        }
        times.insert(t);
    }
    times.insert(cfg.t_end);
    std::vector<double> out(times.begin(), times.end());
    // Merge times closer than round-off.
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }),
              out.end());
    return out;
}

std::size_t apply_floor(std::vector<double> &v, double floor) {
    std::size_t count = 0;
    for (double &x : v) {
        if (std::isnan(x) || x == std::numeric_limits<double>::infinity()) {
            throw NumericalError("solution became non-finite");
        }
        if (x < floor) {
            x = floor;
            ++count;
        }
    }
    return count;
}

// Step sizes that land exactly on each target.
template <class StepFn> void march(double t0, const std::vector<double> &targets, double dt, StepFn &&step,
                                   const std::function<void(double)> &on_target) {
    double t = t0;
    for (double target : targets) {
        while (t < target) {
            double h = dt;
            if (t + h >= target - 1e-9 * dt) {
                h = target - t;
            }
            const double taken = step(t, h);
            if (taken < h) {
                t += taken;
                continue;
            }
            t = (h == target - t) ? target : t + h;
        }
        on_target(target);
    }
}

}  // namespace

void linear_rhs(const ScalarField &rho, const VectorField &drift, const ScalarField &reaction,
                std::vector<double> &out) {
    const GridSpec &g = rho.grid();
    out.resize(g.size());
    const int d = g.dim();
    const double *f = rho.values().data();
    const auto n = static_cast<long long>(g.size());
#pragma omp parallel for schedule(static)
    for (long long node = 0; node < n; ++node) {
        const auto ijk = g.unravel(node);
        double acc = reaction[node] * f[node];
        for (int a = 0; a < d; ++a) {
            const AxisDiff df = neumann_diff(f, node, g.stride(a), ijk[a], g.count(a), g.periodic(), g.spacing(a));
            acc += df.second + drift(node, a) * df.first;
        }
        out[node] = acc;
    }
}

ScalarField linear_operator(const ScalarField &rho, const PotentialSpec &u1, const PotentialSpec &u2) {
    std::vector<double> out;
    linear_rhs(rho, u1.sample_gradient(rho.grid()), u2.sample(rho.grid()), out);
    return ScalarField(rho.grid(), std::move(out));
}

Trajectory solve_linear(const ScalarField &rho0, const PotentialSpec &u1, const PotentialSpec &u2,
                        const SolverConfig &cfg) {
    const GridSpec &g = rho0.grid();
    u1.check_admissible(g);
    u2.check_admissible(g);
    const std::vector<double> targets = output_times(cfg);
    if (cfg.scheme == Scheme::explicit_euler && cfg.dt > explicit_dt_limit(g) * (1.0 + 1e-12)) {
        throw ConfigError("explicit scheme requires dt <= " + std::to_string(explicit_dt_limit(g)) +
                          " on this grid (got " + std::to_string(cfg.dt) + ")");
    }
    for (double v : rho0.values()) {
        if (!(v > 0.0)) {
            throw ConfigError("initial data must be strictly positive");
        }
    }

    Trajectory traj;
    traj.equation = Equation::linear;
    traj.u1 = u1;
    traj.u2 = u2;
    traj.dt = cfg.dt;
    traj.t_start = cfg.t_start;
    traj.snapshots.push_back({cfg.t_start, rho0});

    const VectorField drift = u1.sample_gradient(g);
    const ScalarField reaction = u2.sample(g);
    const std::vector<double> w = face_weights(g);
    ScalarField rho = rho0;
    std::vector<double> rhs, lap, b(g.size());

    auto step = [&](double, double h) {
        std::vector<double> &v = rho.values();
        if (cfg.scheme == Scheme::explicit_euler) {
            linear_rhs(rho, drift, reaction, rhs);
            for (std::size_t i = 0; i < v.size(); ++i) {
                v[i] += h * rhs[i];
            }
        } else {
            // Crank-Nicolson on Delta, forward Euler on drift and reaction.
            linear_rhs(rho, drift, reaction, rhs);
            neumann_laplacian(g, v, lap);
            for (std::size_t i = 0; i < v.size(); ++i) {
                b[i] = v[i] + h * (rhs[i] - 0.5 * lap[i]);
            }
            std::vector<double> x = v;
            solve_shifted_laplacian(g, w, 0.5 * h, b, x);
            v.swap(x);
        }
        traj.floor_activations += apply_floor(v, cfg.floor);
        ++traj.steps;
        return h;
    };
    march(cfg.t_start, targets, cfg.dt, step, [&](double t) {
        rho.check_finite("solution");
        traj.snapshots.push_back({t, rho});
    });
    return traj;
}

Trajectory solve_porous_medium(const ScalarField &rho0, double m, const PotentialSpec &U, const SolverConfig &cfg) {
    const GridSpec &g = rho0.grid();
    U.check_admissible(g);
    const std::vector<double> targets = output_times(cfg);
    const int n = g.dim();
    if (!(m > 0.0) || !(m - 1.0 + 2.0 / n > 0.0)) {
        throw ConfigError("porous medium exponent requires m > 0 and m - 1 + 2/n > 0");
    }
    if (m < 1.0 && !(cfg.floor > 0.0)) {
        throw ConfigError("m < 1 requires a strictly positive floor");
    }
    for (double v : rho0.values()) {
        if (!(v >= cfg.floor) || (m < 1.0 && !(v > 0.0))) {
            throw ConfigError("initial data must be >= the positivity floor");
        }
    }

    Trajectory traj;
    traj.equation = Equation::porous_medium;
    traj.u1 = U;
    traj.u2 = PotentialSpec::zero(n);
    traj.m = m;
    traj.dt = cfg.dt;
    traj.t_start = cfg.t_start;
    traj.snapshots.push_back({cfg.t_start, rho0});

    const ScalarField u = U.sample(g);
    const double base = explicit_dt_limit(g);
    const double min_step = 1e-14 * (cfg.t_end - cfg.t_start);
    ScalarField rho = rho0;
    std::vector<double> pm(g.size()), lap;

    auto step = [&](double, double h) {
        std::vector<double> &v = rho.values();
        double diffusivity = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            pm[i] = std::pow(v[i], m);
            diffusivity = std::max(diffusivity, m * std::pow(v[i], m - 1.0));
        }
        if (!std::isfinite(diffusivity)) {
            throw NumericalError("porous medium step limit undefined (unbounded density)");
        }
        const double limit = diffusivity > 0.0 ? base / diffusivity : h;
        const double taken = std::min(h, limit);
        if (taken < min_step) {
            throw NumericalError("porous medium step limit collapsed");
        }
        neumann_laplacian(g, pm, lap);
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] += taken * (lap[i] + u[i] * std::pow(v[i], 2.0 - m));
        }
        traj.floor_activations += apply_floor(v, cfg.floor);
        ++traj.steps;
        return taken;
    };
    march(cfg.t_start, targets, cfg.dt, step, [&](double t) {
        rho.check_finite("solution");
        traj.snapshots.push_back({t, rho});
    });
    return traj;
}

ScalarField fundamental_solution_approx(const Point &x0, double t, const PotentialSpec &u1, const PotentialSpec &u2,
                                        const GridSpec &grid, const SolverConfig &cfg, double sigma0) {
    const double hmax = grid.max_spacing();
    if (sigma0 <= 0.0) {
        sigma0 = 4.0 * hmax;
    }
    if (sigma0 < 4.0 * hmax * (1.0 - 1e-12)) {
        throw ConfigError("sigma0 = " + std::to_string(sigma0) + " is not resolvable; need sigma0 >= 4h = " +
                          std::to_string(4.0 * hmax));
    }
    const double s0 = sigma0 * sigma0;
    if (!(t > s0)) {
        throw ConfigError("kernel time must exceed sigma0^2");
    }
    ScalarField rho0 = ScalarField::sample(grid, [&](const Point &x) {
        const double r2 = norm2(displacement(grid, x, x0));
        return std::exp(-r2 / (4.0 * s0));
    });
    // Discrete normalization, then clamp away from zero for the positivity precondition.
    const double mass = integrate(rho0);
    for (double &v : rho0.values()) {
        v = std::max(v / mass, std::max(cfg.floor, std::numeric_limits<double>::min()));
    }
    SolverConfig local = cfg;
    local.t_start = s0;
    local.t_end = t;
    local.snapshot_times.clear();
    const Trajectory traj = solve_linear(rho0, u1, u2, local);
    return traj.snapshots.back().field;
}

}  // namespace hlab
