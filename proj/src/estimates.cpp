#include "hlab/estimates.hpp"

#include "hlab/closed_forms.hpp"
#include "hlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hlab {

namespace {

void require_not_early(const Trajectory &traj, double t, const CheckOptions &opts) {
    if (t - traj.t_start < opts.early_time_factor * traj.dt * (1.0 - 1e-12)) {
        throw std::domain_error("t - t_start = " + std::to_string(t - traj.t_start) + " is below " +
                                std::to_string(opts.early_time_factor) + " solver steps; no verdict at early times");
    }
}

void require_linear(const Trajectory &traj) {
    if (traj.equation != Equation::linear) {
        throw std::invalid_argument("this check needs a linear-equation trajectory");
    }
}

HypothesisAudit audited(const PotentialSpec &u1, const PotentialSpec &u2, const GridSpec &grid, double k, int n,
                        const CheckOptions &opts, bool matrix) {
    if (!(k >= 0.0)) {
        throw std::domain_error("k must be >= 0");
    }
    HypothesisAudit a = audit_hypotheses(u1, u2, grid, k, n, opts.boundary_layers);
    if (opts.audit) {
        if (!matrix && !a.laplacian_ok) {
            throw HypothesisError("hypothesis Delta V <= n k^2 fails: sup Delta V = " +
                                  std::to_string(a.sup_laplacian_V) + ", n k^2 = " + std::to_string(n * k * k) +
                                  " (smallest admissible k = " + std::to_string(a.k_min_laplacian) + ")");
        }
        if (matrix && !a.hessian_ok) {
            throw HypothesisError("hypothesis hess V <= k^2 I fails: sup lambda_max = " +
                                  std::to_string(a.sup_hessian_V) + ", k^2 = " + std::to_string(k * k) +
                                  " (smallest admissible k = " + std::to_string(a.k_min_hessian) + ")");
        }
    }
    return a;
}

std::vector<std::pair<std::string, double>> audit_extras(const HypothesisAudit &a) {
    return {{"audit_sup_laplacian_V", a.sup_laplacian_V},
            {"audit_sup_hessian_V", a.sup_hessian_V},
            {"audit_inf_V", a.inf_V},
            {"k_min_laplacian", a.k_min_laplacian},
            {"k_min_hessian", a.k_min_hessian}};
}

double li_yau_bound(int n, double k, double t) { return -0.5 * n * a_comparison(-k * k, t); }
double matrix_li_yau_bound(double k, double t) { return -0.5 * a_comparison(-k * k, t); }

Sym3 add_half(Sym3 a, const Sym3 &b) {
    for (int i = 0; i < 6; ++i) {
        a[i] += 0.5 * b[i];
    }
    return a;
}

}  // namespace

AnalyticDensity gaussian_like_density(int n, double k, double t) {
    AnalyticDensity d;
    d.log_value = [=](const Point &x) { return gaussian_like_derivatives(n, k, t, x).log_value; };
    d.lap_log = [=](const Point &x) { return gaussian_like_derivatives(n, k, t, x).lap_log; };
    d.hess_log = [=](const Point &x) {
        const double h = gaussian_like_derivatives(n, k, t, x).hess_log;
        Sym3 m{};
        for (int a = 0; a < n; ++a) {
            m[sym_slot(a, a)] = h;
        }
        return m;
    };
    return d;
}

EstimateReport check_li_yau(const Trajectory &traj, double k, double t, const CheckOptions &opts) {
    require_linear(traj);
    require_not_early(traj, t, opts);
    const ScalarField &rho = traj.at(t);
    const GridSpec &g = rho.grid();
    const int n = g.dim();
    const HypothesisAudit audit = audited(traj.u1, traj.u2, g, k, n, opts, false);
    const ScalarField lap = laplacian(map(rho, [](double v) { return std::log(v); }));
    const double bound = li_yau_bound(n, k, t);
    EstimateReport r;
    r.name = "li_yau";
    r.params = {{"n", static_cast<double>(n)}, {"k", k}, {"t", t}};
    r.tolerance = opts.tolerance;
    r.dim = n;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.node(i);
        const double obs = lap[i] + 0.5 * traj.u1.laplacian(x);
        r.add(x, obs, bound, obs - bound, !g.interior(i, opts.boundary_layers));
    }
    r.extras = audit_extras(audit);
    r.finalize();
    return r;
}

EstimateReport check_li_yau(const AnalyticDensity &rho, const PotentialSpec &u1, const PotentialSpec &u2,
                            const GridSpec &g, double k, double t, const CheckOptions &opts) {
    const int n = g.dim();
    const HypothesisAudit audit = audited(u1, u2, g, k, n, opts, false);
    const double bound = li_yau_bound(n, k, t);
    EstimateReport r;
    r.name = "li_yau";
    r.params = {{"n", static_cast<double>(n)}, {"k", k}, {"t", t}};
    r.tolerance = opts.tolerance;
    r.dim = n;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.node(i);
        const double obs = rho.lap_log(x) + 0.5 * u1.laplacian(x);
        r.add(x, obs, bound, obs - bound, false);
    }
    r.extras = audit_extras(audit);
    r.finalize();
    return r;
}

EstimateReport check_matrix_li_yau(const Trajectory &traj, double k, double t, const CheckOptions &opts) {
    require_linear(traj);
    require_not_early(traj, t, opts);
    const ScalarField &rho = traj.at(t);
    const GridSpec &g = rho.grid();
    const int n = g.dim();
    const HypothesisAudit audit = audited(traj.u1, traj.u2, g, k, n, opts, true);
    const SymmetricMatrixField h = hessian(map(rho, [](double v) { return std::log(v); }));
    const double bound = matrix_li_yau_bound(k, t);
    EstimateReport r;
    r.name = "matrix_li_yau";
    r.params = {{"n", static_cast<double>(n)}, {"k", k}, {"t", t}};
    r.tolerance = opts.tolerance;
    r.dim = n;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.node(i);
        const double obs = eigenvalues(add_half(h.at(i), traj.u1.hessian(x)), n)[0];
        r.add(x, obs, bound, obs - bound, !g.interior(i, opts.boundary_layers));
    }
    r.extras = audit_extras(audit);
    r.finalize();
    return r;
}

EstimateReport check_matrix_li_yau(const AnalyticDensity &rho, const PotentialSpec &u1, const PotentialSpec &u2,
                                   const GridSpec &g, double k, double t, const CheckOptions &opts) {
    const int n = g.dim();
    const HypothesisAudit audit = audited(u1, u2, g, k, n, opts, true);
    const double bound = matrix_li_yau_bound(k, t);
    EstimateReport r;
    r.name = "matrix_li_yau";
    r.params = {{"n", static_cast<double>(n)}, {"k", k}, {"t", t}};
    r.tolerance = opts.tolerance;
    r.dim = n;
    double spread = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.node(i);
        const auto ev = eigenvalues(add_half(rho.hess_log(x), u1.hessian(x)), n);
        spread = std::max(spread, std::max(std::abs(ev[0] - bound), std::abs(ev[n - 1] - bound)));
        r.add(x, ev[0], bound, ev[0] - bound, false);
    }
    r.extras = audit_extras(audit);
    r.extras.emplace_back("max_eigenvalue_deviation", spread);
    r.finalize();
    return r;
}

double harnack_log_bound(int n, double k, double s, double t, double cost, double u1_x, double u1_y) {
    if (!(t > s) || !(s > 0.0)) {
        throw std::domain_error("Harnack bound requires 0 < s < t");
    }
    const double ratio = b_comparison(-k * k, t) / b_comparison(-k * k, s);
    return -0.5 * n * std::log(ratio) - 0.5 * (cost + u1_y - u1_x);
}

namespace {

EstimateReport harnack_core(const std::function<double(double, const Point &)> &log_rho, const PotentialSpec &u1,
                            const PotentialSpec &u2, const std::optional<GridSpec> &torus, int n, double k, double s,
                            double t, const std::vector<std::pair<Point, Point>> &pairs, const CheckOptions &opts,
                            const CostOptions &cost_opts) {
    if (pairs.empty()) {
        throw std::invalid_argument("Harnack check needs at least one pair");
    }
    CostFunctional fn = CostFunctional::kinetic(u1, u2);
    fn.torus = torus;
    EstimateReport r;
    r.name = "harnack";
    r.params = {{"n", static_cast<double>(n)}, {"k", k}, {"s", s}, {"t", t}};
    r.tolerance = opts.tolerance;
    r.dim = n;
    std::vector<CostResult> results(pairs.size());
    const auto np = static_cast<long long>(pairs.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < np; ++i) {
        results[i] = minimize_cost(pairs[i].first, pairs[i].second, s, t, fn, cost_opts);
    }
    double worst_el = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto &[x, y] = pairs[i];
        if (!results[i].converged) {
            throw NumericalError("Harnack cost minimization did not converge for a pair (gradient norm " +
                                 std::to_string(results[i].gradient_norm) + ")");
        }
        worst_el = std::max(worst_el, results[i].euler_lagrange_residual);
        const double obs = log_rho(t, y) - log_rho(s, x);
        const double bound = harnack_log_bound(n, k, s, t, results[i].value, u1.value(x), u1.value(y));
        r.add(y, obs, bound, obs - bound, false);
    }
    r.extras.emplace_back("max_euler_lagrange_residual", worst_el);
    r.finalize();
    return r;
}

}  // namespace

EstimateReport check_harnack(const Trajectory &traj, double k, double s, double t,
                             const std::vector<std::pair<Point, Point>> &pairs, const CheckOptions &opts,
                             const CostOptions &cost_opts) {
    require_linear(traj);
    require_not_early(traj, s, opts);
    const ScalarField &rs = traj.at(s);
    const ScalarField &rt = traj.at(t);
    const GridSpec &g = rs.grid();
    const int n = g.dim();
    const HypothesisAudit audit = audited(traj.u1, traj.u2, g, k, n, opts, false);
    auto log_rho = [&](double tau, const Point &x) {
        return std::log(interpolate(tau == s ? rs : rt, x));
    };
    std::optional<GridSpec> torus;
    if (g.periodic()) {
        torus = g;
    }
    EstimateReport r = harnack_core(log_rho, traj.u1, traj.u2, torus, n, k, s, t, pairs, opts, cost_opts);
    for (const auto &e : audit_extras(audit)) {
        r.extras.push_back(e);
    }
    return r;
}

EstimateReport check_harnack(const std::function<double(double, const Point &)> &log_rho, const PotentialSpec &u1,
                             const PotentialSpec &u2, int n, double k, double s, double t,
                             const std::vector<std::pair<Point, Point>> &pairs, const CheckOptions &opts,
                             const CostOptions &cost_opts) {
    return harnack_core(log_rho, u1, u2, std::nullopt, n, k, s, t, pairs, opts, cost_opts);
}

double cheeger_yau_log_bound(int n, double k, double t, double cost, double u1_x0, double u1_y) {
    return 0.5 * n * std::log(1.0 / (4.0 * std::numbers::pi * b_comparison(-k * k, t))) -
           0.5 * (cost + u1_y - u1_x0);
}

EstimateReport check_cheeger_yau(const ScalarField &kernel, const Point &x0, const PotentialSpec &u1,
                                 const PotentialSpec &u2, double k, double t, const CheegerYauOptions &opts) {
    const GridSpec &g = kernel.grid();
    const int n = g.dim();
    const HypothesisAudit audit = audited(u1, u2, g, k, n, opts.check, false);
    const double pmax = *std::max_element(kernel.values().begin(), kernel.values().end());
    std::vector<char> active(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        active[i] = (g.interior(i, opts.check.boundary_layers) && kernel[i] >= opts.core_fraction * pmax) ? 1 : 0;
    }
    CostFunctional fn = CostFunctional::kinetic(u1, u2);
    if (g.periodic()) {
        fn.torus = g;
    }
    const CostField cost = cost_field(x0, t, fn, g, opts.cost, &active);
    EstimateReport r;
    r.name = "cheeger_yau";
    r.params = {{"n", static_cast<double>(n)}, {"k", k}, {"t", t}};
    r.tolerance = opts.check.tolerance;
    r.dim = n;
    const double u1x0 = u1.value(x0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point y = g.node(i);
        const bool skip = !active[i] || cost.flagged[i];
        const double obs = std::log(kernel[i]);
        const double bound = skip ? 0.0 : cheeger_yau_log_bound(n, k, t, cost.value[i], u1x0, u1.value(y));
        r.add(y, obs, bound, skip ? 0.0 : obs - bound, skip);
    }
    r.extras = audit_extras(audit);
    r.extras.emplace_back("nonconverged", static_cast<double>(cost.nonconverged));
    r.extras.emplace_back("multiple_minima", static_cast<double>(cost.multiple));
    r.finalize();
    return r;
}

double aronson_benilan_bound(int n, double m, double k3, double t) {
    const double q = 2.0 + n * (m - 1.0);
    return (2.0 * n / q) * a_comparison(k3 * q / (2.0 * n), t);
}

EstimateReport check_aronson_benilan(const Trajectory &traj, double k3, double t, const AronsonBenilanOptions &opts) {
    if (traj.equation != Equation::porous_medium) {
        throw std::invalid_argument("Aronson-Benilan check needs a porous-medium trajectory");
    }
    require_not_early(traj, t, opts.check);
    const double m = traj.m;
    if (m == 1.0) {
        throw std::domain_error("Aronson-Benilan check needs m != 1");
    }
    const ScalarField &rho = traj.at(t);
    const GridSpec &g = rho.grid();
    const int n = g.dim();
    if (!(m - 1.0 + 2.0 / n > 0.0)) {
        throw ConfigError("Aronson-Benilan check needs m - 1 + 2/n > 0");
    }
    const double inf_lap_u = inf_laplacian(traj.u1, g, opts.check.boundary_layers);
    if (opts.check.audit && !within_slack(k3 / (2.0 * m), inf_lap_u)) {
        throw HypothesisError("hypothesis Delta U >= k3/(2m) fails: inf Delta U = " + std::to_string(inf_lap_u) +
                              ", k3/(2m) = " + std::to_string(k3 / (2.0 * m)));
    }
    // Support exclusion, dilated by the band in the max-norm.
    std::vector<char> outside(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        outside[i] = rho[i] < opts.support_factor * opts.floor ? 1 : 0;
    }
    std::vector<char> ex(g.size(), 0);
    const int band = std::max(0, opts.support_band);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.interior(i, opts.check.boundary_layers)) {
            ex[i] = 1;
            continue;
        }
        const auto ijk = g.unravel(i);
        const int span[3] = {band, g.dim() > 1 ? band : 0, g.dim() > 2 ? band : 0};
        bool hit = false;
        for (int c = -span[2]; c <= span[2] && !hit; ++c) {
            for (int b = -span[1]; b <= span[1] && !hit; ++b) {
                for (int a = -span[0]; a <= span[0] && !hit; ++a) {
                    int q[3] = {ijk[0] + a, ijk[1] + b, ijk[2] + c};
                    bool inside = true;
                    for (int ax = 0; ax < g.dim(); ++ax) {
                        if (g.periodic()) {
                            q[ax] = (q[ax] % g.count(ax) + g.count(ax)) % g.count(ax);
                        } else if (q[ax] < 0 || q[ax] >= g.count(ax)) {
                            inside = false;
                        }
                    }
                    if (inside && outside[g.index(q[0], q[1], q[2])]) {
                        hit = true;
                    }
                }
            }
        }
        ex[i] = hit ? 1 : 0;
    }
    const ScalarField pressure = map(rho, [m](double v) { return std::pow(v, m - 1.0); });
    const ScalarField lap = laplacian(pressure);
    const double coeff = 2.0 * m / (1.0 - m);
    const double bound = aronson_benilan_bound(n, m, k3, t);
    EstimateReport r;
    r.name = "aronson_benilan";
    r.params = {{"n", static_cast<double>(n)}, {"m", m}, {"k3", k3}, {"t", t}};
    r.tolerance = opts.check.tolerance;
    r.dim = n;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double obs = coeff * lap[i];
        r.add(g.node(i), obs, bound, bound - obs, ex[i]);
    }
    r.extras = {{"audit_inf_laplacian_U", inf_lap_u}};
    r.finalize();
    return r;
}

EstimateReport check_liouville(const ScalarField &rho, const PotentialSpec &u1, const PotentialSpec &u2,
                               const LiouvilleOptions &opts) {
    const GridSpec &g = rho.grid();
    const int n = g.dim();
    const ScalarField V = ScalarField::sample(g, [&](const Point &x) { return schrodinger_value(u1, u2, x); });
    const double inf_v = inf_interior(V, opts.check.boundary_layers);
    if (!within_slack(-inf_v, 0.0)) {
        throw HypothesisError("V = Delta U1 + |grad U1|^2/2 - 2 U2 is negative somewhere (inf V = " +
                              std::to_string(inf_v) + "); no positive steady solution is asserted");
    }
    for (double v : rho.values()) {
        if (!(v > 0.0)) {
            throw std::invalid_argument("Liouville check needs a positive density");
        }
    }
    const ScalarField residual = linear_operator(rho, u1, u2);
    double res = 0.0, top = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        res = std::max(res, std::abs(residual[i]));
        top = std::max(top, rho[i]);
    }
    const double steady = res / top;
    if (steady > opts.steady_tolerance) {
        throw NumericalError("density is not steady: max |rho'| / max rho = " + std::to_string(steady));
    }
    const VectorField glog = gradient(map(rho, [](double v) { return std::log(v); }));
    EstimateReport r;
    r.name = "liouville";
    r.params = {{"n", static_cast<double>(n)}};
    r.tolerance = opts.check.tolerance;
    r.dim = n;
    double vmax = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.node(i);
        const Point w = glog.at(i) + 0.5 * u1.gradient(x);
        const double obs = norm2(w);
        const double bound = 0.5 * V[i];
        vmax = std::max(vmax, std::abs(V[i]));
        r.add(x, obs, bound, bound - obs, !g.interior(i, opts.check.boundary_layers));
    }
    r.extras = {{"steady_residual", steady}, {"inf_V", inf_v}};
    if (vmax <= 1e-10) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double c = rho[i] * std::exp(0.5 * u1.value(g.node(i)));
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        r.extras.emplace_back("constant_sup", hi);
        r.extras.emplace_back("constant_inf", lo);
        r.extras.emplace_back("constant_ratio_deviation", hi / lo - 1.0);
    }
    r.finalize();
    return r;
}

}  // namespace hlab
