// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "hlab/action.hpp"
#include "hlab/closed_forms.hpp"
#include "hlab/config.hpp"
#include "hlab/estimates.hpp"
#include "hlab/experiments.hpp"
#include "hlab/flow.hpp"
#include "hlab/pde.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace hlab;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        pass = pass && ok;
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += what + (ok ? "" : " [FAIL]");
    }
};

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Trajectory sampled_sharp(const GridSpec &g, double k, const std::vector<double> &times) {
    Trajectory tr;
    tr.u1 = PotentialSpec::quadratic(g.dim(), -k);
    tr.u2 = PotentialSpec::zero(g.dim());
    tr.dt = 1e-6;
    tr.snapshots.push_back({0.0, ScalarField(g, 1.0)});
    for (double t : times) {
        tr.snapshots.push_back(
            {t, ScalarField::sample(g, [&](const Point &x) { return gaussian_like_solution(g.dim(), k, t, x); })});
    }
    return tr;
}

Outcome sharp_li_yau(bool matrix) {
    Outcome o;
    const std::vector<double> times = {0.3, 0.7, 1.5};
    for (int n : {1, 2}) {
        const GridSpec g = GridSpec::uniform(n, 16.0, n == 1 ? 512 : 128, Topology::box);
        const auto u1 = PotentialSpec::quadratic(n, -1.0);
        const auto u2 = PotentialSpec::zero(n);
        const Trajectory tr = sampled_sharp(g, 1.0, times);
        double analytic = 0.0, stencil = 0.0;
        for (double t : times) {
            const auto rho = gaussian_like_density(n, 1.0, t);
            const auto a = matrix ? check_matrix_li_yau(rho, u1, u2, g, 1.0, t) : check_li_yau(rho, u1, u2, g, 1.0, t);
            const auto s = matrix ? check_matrix_li_yau(tr, 1.0, t) : check_li_yau(tr, 1.0, t);
            analytic = std::max(analytic, a.max_abs_margin());
            stencil = std::max(stencil, s.max_abs_margin());
        }
        o.require(analytic <= 1e-10, "n=" + std::to_string(n) + " analytic " + fmt("%.1e", analytic) + " <= 1e-10");
        o.require(stencil <= 5e-3, "stencil " + fmt("%.1e", stencil) + " <= 5e-3");
    }
    return o;
}

Outcome solver_convergence() {
    Outcome o;
    double err[2];
    for (int j = 0; j < 2; ++j) {
        const GridSpec g = GridSpec::uniform(1, 16.0, 512 << j, Topology::box);
        SolverConfig c;
        c.dt = explicit_dt_limit(g);  // dt ~ h^2: halving h quarters dt, matching the O(dt + h^2) error
        c.t_start = 0.2;
        c.t_end = 0.6;
        const auto rho0 = ScalarField::sample(g, [](const Point &x) { return gaussian_like_solution(1, 1.0, 0.2, x); });
        const auto tr = solve_linear(rho0, PotentialSpec::quadratic(1, -1.0), PotentialSpec::zero(1), c);
        const auto &rho = tr.at(0.6);
        err[j] = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            err[j] = std::max(err[j], std::abs(rho[i] - gaussian_like_solution(1, 1.0, 0.6, g.node(i))));
        }
    }
    o.require(err[0] <= 2e-4, "N=512 error " + fmt("%.2e", err[0]) + " <= 2e-4");
    o.require(err[0] / err[1] >= 3.5, "ratio " + fmt("%.3f", err[0] / err[1]) + " >= 3.5");
    return o;
}

Outcome quadratic_cost_oracle() {
    Outcome o;
    const double k = 1.0, t = 1.0;
    const auto fn = CostFunctional::kinetic(PotentialSpec::quadratic(1, -k), PotentialSpec::zero(1));
    double rel = 0.0, path = 0.0;
    bool converged = true;
    for (int i = 0; i < 10; ++i) {
        const Point y{-1.8 + 0.4 * i, 0.0, 0.0};
        const auto r = minimize_cost({0.0, 0.0, 0.0}, y, 0.0, t, fn);
        converged = converged && r.converged;
        const double exact = quadratic_cost(1, k, t, y);
        rel = std::max(rel, std::abs(r.value - exact) / std::abs(exact));
        for (int j = 0; j < r.path.size(); ++j) {
            path = std::max(path, std::abs(r.path.x[j][0] - quadratic_minimizer(k, t, y, r.path.time(j))[0]));
        }
    }
    o.require(converged, "10 endpoints converged");
    o.require(rel <= 1e-4, "relative cost error " + fmt("%.2e", rel) + " <= 1e-4");
    o.require(path <= 1e-4, "path sup error " + fmt("%.2e", path) + " <= 1e-4");
    return o;
}

Outcome comparison_sharpness() {
    Outcome o;
    const GridSpec g = GridSpec::uniform(2, 4.0, 64, Topology::box);
    const auto fn = CostFunctional::drift(PotentialSpec::zero(2), PotentialSpec::quadratic(2, -1.0));
    const auto field = cost_field({0.0, 0.0, 0.0}, 1.0, fn, g);
    const auto lap = check_laplacian_comparison(field, -2.0, 2, 1.0);
    const auto hess = check_hessian_comparison(field, -1.0, 1.0);
    o.require(lap.max_abs_margin() <= 5e-3, "Laplacian |margin| " + fmt("%.1e", lap.max_abs_margin()) + " <= 5e-3");
    o.require(hess.max_abs_margin() <= 5e-3, "Hessian |margin| " + fmt("%.1e", hess.max_abs_margin()) + " <= 5e-3");
    return o;
}

RunSummary run_preset(const std::string &name, const std::function<void(ExperimentConfig &)> &edit = {}) {
    ExperimentConfig cfg = load_config(resolve_config_path(name));
    if (edit) {
        edit(cfg);
    }
    RunOptions opts;
    opts.write = false;
    return run(cfg, opts);
}

// Worst margins over every report check of a run.
std::pair<double, double> margin_range(const RunSummary &s) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto &c : s.checks) {
        lo = std::min(lo, c.detail["min_margin"].get<double>());
        hi = std::max(hi, c.detail["max_margin"].get<double>());
    }
    return {lo, hi};
}

Outcome harnack_cheeger_yau() {
    Outcome o;
    for (const char *name : {"harnack-sharp", "cheeger-yau-sharp"}) {
        const auto s = run_preset(name);
        const auto [lo, hi] = margin_range(s);
        o.require(s.exit_code == 0 && lo >= -2e-2 && hi <= 2e-2,
                  std::string(name) + " margins [" + fmt("%.1e", lo) + ", " + fmt("%.1e", hi) + "] within 2e-2");
    }
    for (const char *name : {"harnack-torus", "cheeger-yau-bump-u1", "cheeger-yau-bump-u2"}) {
        const auto s = run_preset(name);
        const double lo = s.checks.empty() ? -INFINITY : margin_range(s).first;
        o.require(s.exit_code == 0 && lo >= -1e-2, std::string(name) + " min " + fmt("%.2e", lo) + " >= -1e-2");
    }
    return o;
}

Outcome aronson_benilan() {
    Outcome o;
    {
        const auto s = run_preset("ab-barenblatt");
        double worst = 0.0;
        for (const auto &c : s.checks) {
            const double t = c.detail["t"].get<double>();
            if (t == 1.0 || t == 2.0) {
                worst = std::max({worst, std::abs(c.detail["min_margin"].get<double>()),
                                  std::abs(c.detail["max_margin"].get<double>())});
            }
        }
        o.require(s.exit_code == 0 && worst <= 5e-3, "Barenblatt |margin| " + fmt("%.2e", worst) + " <= 5e-3");
    }
    {
        const auto s = run_preset("ab-torus");
        const double lo = s.checks.empty() ? -INFINITY : margin_range(s).first;
        o.require(s.exit_code == 0 && lo >= -5e-3, "generic min " + fmt("%.2e", lo) + " >= -5e-3");
    }
    return o;
}

Outcome huisken() {
    Outcome o;
    {
        const auto s = run_preset("flow-sharp");
        const bool ok = s.exit_code == 0;
        const double drift = ok ? s.check("huisken_constant").value : INFINITY;
        const double radius = ok ? s.check("radius_oracle").value : INFINITY;
        o.require(drift <= 1e-3, "sharp drift " + fmt("%.2e", drift) + " <= 1e-3");
        o.require(radius <= 1e-4, "radius error " + fmt("%.2e", radius) + " <= 1e-4");
    }
    for (HuiskenVariant v : {HuiskenVariant::weighted, HuiskenVariant::sinh, HuiskenVariant::b}) {
        const auto s = run_preset("flow-torus", [v](ExperimentConfig &c) { c.flow.variant = v; });
        const double slope = s.exit_code == 0 ? s.check("huisken_monotone").value : INFINITY;
        o.require(slope <= 1e-3, "generic " + to_string(v) + " max slope " + fmt("%.2e", slope) + " <= 1e-3");
    }
    return o;
}

Outcome volume() {
    Outcome o;
    for (const char *name : {"volume-torus", "volume-heat"}) {
        const auto s = run_preset(name);
        const double inc = s.exit_code == 0 ? s.check("volume_nonincreasing").value : INFINITY;
        o.require(inc <= 1e-3, std::string(name) + " max step increase " + fmt("%.1e", inc) + " <= 1e-3");
    }
    const auto s = run_preset("volume-sharp");
    const double drift = s.exit_code == 0 ? s.check("volume_constant").value : INFINITY;
    o.require(drift <= 1e-3, "sharp drift " + fmt("%.2e", drift) + " <= 1e-3");
    return o;
}

Outcome classical_limits() {
    Outcome o;
    const double k = 1e-8;
    const double pi = std::numbers::pi;
    double worst = 0.0;
    auto rel = [&](double a, double b) { worst = std::max(worst, std::abs(a - b) / std::abs(b)); };
    for (int n : {1, 2, 3}) {
        const GridSpec g = GridSpec::uniform(n, 4.0, n == 3 ? 8 : 16, Topology::box);
        for (double t : {0.1, 0.5, 2.0}) {
            // Li-Yau: -n/(2t); Hamilton's matrix form: -1/(2t)
            const auto rho = gaussian_like_density(n, 0.0, t);
            const auto ly = check_li_yau(rho, PotentialSpec::zero(n), PotentialSpec::zero(n), g, k, t);
            const auto my = check_matrix_li_yau(rho, PotentialSpec::zero(n), PotentialSpec::zero(n), g, k, t);
            rel(ly.bound.front(), -n / (2 * t));
            rel(my.bound.front(), -1.0 / (2 * t));
            // Harnack: -(n/2) log(t/s) - |x - y|^2 / (4 (t - s))
            const double s = 0.5 * t, d2 = 0.7;
            rel(harnack_log_bound(n, k, s, t, d2 / (2 * (t - s)), 0.0, 0.0),
                -0.5 * n * std::log(t / s) - d2 / (4 * (t - s)));
            // Cheeger-Yau: (4 pi t)^{-n/2} exp(-d^2 / 4t)
            rel(cheeger_yau_log_bound(n, k, t, d2 / (2 * t), 0.0, 0.0), -0.5 * n * std::log(4 * pi * t) - d2 / (4 * t));
        }
    }
    for (double tau : {0.05, 0.5, 2.0}) {
        HuiskenParams p;
        p.variant = HuiskenVariant::sinh;
        p.k = k;
        rel(huisken_prefactor(p, tau), std::sqrt(tau));
    }
    o.require(worst <= 1e-6, "max relative deviation " + fmt("%.1e", worst) + " <= 1e-6");
    return o;
}

struct Criterion {
    int id;
    const char *title;
    double budget_seconds;
    std::function<Outcome()> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "sharp Li-Yau equality", 5.0, [] { return sharp_li_yau(false); }},
        {2, "sharp matrix Li-Yau equality", 5.0, [] { return sharp_li_yau(true); }},
        {3, "solver-vs-oracle convergence", 30.0, solver_convergence},
        {4, "quadratic cost oracle", 20.0, quadratic_cost_oracle},
        {5, "comparison-theorem sharpness", 300.0, comparison_sharpness},
        {6, "Harnack and Cheeger-Yau tightness", 0.0, harnack_cheeger_yau},
        {7, "Aronson-Benilan", 30.0, aronson_benilan},
        {8, "Huisken balance", 120.0, huisken},
        {9, "volume monotonicity", 60.0, volume},
        {10, "classical limits", 0.0, classical_limits},
    };
    int failures = 0;
    for (const auto &c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception &e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0.0) {
            o.require(secs <= c.budget_seconds, "runtime " + fmt("%.2f", secs) + " s <= " + fmt("%.0f", c.budget_seconds) + " s");
        } else {
            o.detail += "; runtime " + fmt("%.2f", secs) + " s";
        }
        failures += o.pass ? 0 : 1;
        std::printf("criterion %2d %s: %s (%s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
