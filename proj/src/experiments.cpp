#include "hlab/experiments.hpp"

#include "hlab/action.hpp"
#include "hlab/closed_forms.hpp"
#include "hlab/errors.hpp"
#include "hlab/estimates.hpp"
#include "hlab/flow.hpp"
#include "hlab/io.hpp"
#include "hlab/pde.hpp"
#include "hlab/svg.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <thread>

namespace hlab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const CheckResult &RunSummary::check(const std::string &check_name) const {
    for (const auto &c : checks) {
        if (c.name == check_name) {
            return c;
        }
    }
    throw std::out_of_range("run has no check " + check_name);
}

ScalarField initial_datum(const ExperimentConfig &cfg) {
    const GridSpec &g = cfg.grid;
    const InitialSpec &ini = cfg.initial;
    const int n = g.dim();
    const double t0 = cfg.solver.t_start;
    auto rel = [&](const Point &x) { return displacement(g, x, ini.center); };
    if (ini.kind == "sharp") {
        return ScalarField::sample(g, [&](const Point &x) { return gaussian_like_solution(n, ini.k, t0, rel(x)); });
    }
    if (ini.kind == "flow_sharp") {
        return ScalarField::sample(g, [&](const Point &x) { return flow_sharp_density(n, ini.k, t0, rel(x)); });
    }
    if (ini.kind == "heat_kernel") {
        return ScalarField::sample(g, [&](const Point &x) { return heat_kernel(n, t0, rel(x), {0.0, 0.0, 0.0}); });
    }
    if (ini.kind == "barenblatt") {
        const BarenblattProfile b{n, ini.m, ini.C};
        const double floor = cfg.solver.floor;
        return ScalarField::sample(g, [&](const Point &x) { return std::max(b.value(t0, rel(x)), floor); });
    }
    if (ini.kind == "constant") {
        return ScalarField(g, ini.value);
    }
    // random_trig: base + sum_j amplitude u_j cos(2 pi <mode_j, x / L> + phase_j), u_j in [0, 1]
    std::mt19937 rng(ini.seed);
    std::uniform_int_distribution<int> mode(-2, 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    struct Wave {
        std::array<int, 3> mode;
        double weight;
        double phase;
    };
    std::vector<Wave> waves;
    for (int j = 0; j < ini.modes; ++j) {
        Wave w{{0, 0, 0}, 0.0, 0.0};
        do {
            for (int a = 0; a < n; ++a) {
                w.mode[a] = mode(rng);
            }
        } while (w.mode[0] == 0 && w.mode[1] == 0 && w.mode[2] == 0);
        w.weight = unit(rng);
        w.phase = 2.0 * std::numbers::pi * unit(rng);
        waves.push_back(w);
    }
    return ScalarField::sample(g, [&](const Point &x) {
        double v = ini.base;
        for (const auto &w : waves) {
            double arg = w.phase;
            for (int a = 0; a < n; ++a) {
                arg += 2.0 * std::numbers::pi * w.mode[a] * x[a] / g.extent(a);
            }
            v += ini.amplitude * w.weight * std::cos(arg);
        }
        return v;
    });
}

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

json audit_json(const HypothesisAudit &a) {
    json j;
    j["k"] = a.k;
    j["n"] = a.n;
    j["sup_laplacian_V"] = a.sup_laplacian_V;
    j["sup_hessian_V"] = a.sup_hessian_V;
    j["sup_grad_V"] = a.sup_grad_V;
    j["inf_V"] = a.inf_V;
    j["k_min_laplacian"] = a.k_min_laplacian;
    j["k_min_hessian"] = a.k_min_hessian;
    j["laplacian_ok"] = a.laplacian_ok;
    j["hessian_ok"] = a.hessian_ok;
    j["V_nonnegative"] = a.V_nonnegative;
    return j;
}

json document_json(const IniDocument &doc) {
    json j;
    for (const auto &e : doc.globals) {
        j[e.key] = e.value;
    }
    for (const auto &s : doc.sections) {
        json sec = json::object();
        for (const auto &e : s.entries) {
            sec[e.key] = e.value;
        }
        j[s.name] = sec;
    }
    return j;
}

std::string time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", t);
    return buf;
}

// Collects everything a run produces before it is written out.
struct Context {
    const ExperimentConfig &cfg;
    RunSummary &summary;
    std::vector<std::pair<std::string, EstimateReport>> reports;  // (label, report)
    std::vector<std::string> series_header;
    std::vector<std::vector<double>> series_rows;
    std::vector<LinePlot> plots;
    std::vector<std::string> plot_files;
    std::vector<std::pair<std::string, ScalarField>> fields;
    std::vector<FlowSample> curves;

    void add_report(const std::string &label, EstimateReport r, double t) {
        CheckResult c;
        c.name = label;
        c.pass = r.pass;
        c.statistic = "min_margin";
        c.value = r.min_margin;
        c.threshold = -r.tolerance;
        c.detail = to_json(r);
        if (std::isfinite(t)) {
            c.detail["t"] = t;
        }
        summary.checks.push_back(c);
        reports.emplace_back(label, std::move(r));
    }

    void add_statistic(const std::string &name, const std::string &statistic, double value, double threshold,
                       bool upper, json detail = json::object()) {
        CheckResult c;
        c.name = name;
        c.statistic = statistic;
        c.value = value;
        c.threshold = threshold;
        c.pass = upper ? value <= threshold : value >= threshold;
        c.detail = std::move(detail);
        summary.checks.push_back(std::move(c));
    }
};

double solver_dt(const ExperimentConfig &cfg) {
    if (!cfg.dt_auto) {
        return cfg.solver.dt;
    }
    if (cfg.solver.scheme == Scheme::explicit_euler) {
        return explicit_dt_limit(cfg.grid);
    }
    return std::min(0.25 * cfg.grid.min_spacing(), 1e-2);
}

Trajectory solve(const ExperimentConfig &cfg, std::vector<double> snapshots, double t_end) {
    SolverConfig sc = cfg.solver;
    sc.dt = solver_dt(cfg);
    sc.t_end = t_end;
    sc.snapshot_times = std::move(snapshots);
    const ScalarField rho0 = initial_datum(cfg);
    return solve_linear(rho0, cfg.u1, cfg.u2, sc);
}

CheckOptions check_options(const ExperimentConfig &cfg) {
    CheckOptions o;
    o.tolerance = cfg.estimate.tolerance;
    o.boundary_layers = cfg.estimate.boundary_layers;
    return o;
}

HypothesisAudit audit_stage(Context &ctx, bool matrix) {
    const ExperimentConfig &cfg = ctx.cfg;
    const int n = cfg.grid.dim();
    HypothesisAudit a = audit_hypotheses(cfg.u1, cfg.u2, cfg.grid, 0.0, n, cfg.estimate.boundary_layers);
    const double k = cfg.estimate.k.value_or(matrix ? a.k_min_hessian : a.k_min_laplacian);
    a = audit_hypotheses(cfg.u1, cfg.u2, cfg.grid, k, n, cfg.estimate.boundary_layers);
    ctx.summary.audit = audit_json(a);
    ctx.summary.audit["k_source"] = cfg.estimate.k ? "config" : "audit";
    const bool ok = matrix ? a.hessian_ok : a.laplacian_ok;
    ctx.summary.audit["pass"] = ok;
    if (!ok) {
        throw HypothesisError(std::string("hypothesis audit failed: ") +
                              (matrix ? "hess V <= k^2 I" : "Delta V <= n k^2") + " does not hold at k = " +
                              format_double(k) + " (smallest admissible k = " +
                              format_double(matrix ? a.k_min_hessian : a.k_min_laplacian) + ")");
    }
    return a;
}

void margin_series(Context &ctx, const std::string &what) {
    ctx.series_header = {"t", "bound", "min_margin", "max_margin"};
    PlotSeries s{what + " min margin", {}, {}};
    for (const auto &[label, r] : ctx.reports) {
        const double t = r.param("t");
        ctx.series_rows.push_back({t, r.bound.empty() ? 0.0 : r.bound.front(), r.min_margin, r.max_margin});
        s.x.push_back(t);
        s.y.push_back(r.min_margin);
    }
    LinePlot p{what + ": min margin vs t", "t", "min margin", {s}, -ctx.cfg.estimate.tolerance};
    ctx.plots.push_back(p);
    ctx.plot_files.push_back("margins.svg");
}

void run_li_yau(Context &ctx, bool matrix) {
    const ExperimentConfig &cfg = ctx.cfg;
    const int n = cfg.grid.dim();
    const HypothesisAudit a = audit_stage(ctx, matrix);
    const double k = a.k;
    CheckOptions opts = check_options(cfg);
    const std::string label = matrix ? "matrix_li_yau" : "li_yau";
    if (cfg.estimate.mode == "analytic") {
        const QuadraticTerm q = cfg.u1.quadratic_part();
        if (!cfg.u1.is_quadratic() || q.a > 0.0 || norm2(q.b) != 0.0 || !cfg.u2.is_zero()) {
            throw ConfigError("mode = analytic needs U1 = -k|x|^2/2 (k >= 0) and U2 = 0");
        }
        for (double t : cfg.estimate.times) {
            const AnalyticDensity rho = gaussian_like_density(n, -q.a, t);
            EstimateReport r = matrix ? check_matrix_li_yau(rho, cfg.u1, cfg.u2, cfg.grid, k, t, opts)
                                      : check_li_yau(rho, cfg.u1, cfg.u2, cfg.grid, k, t, opts);
            ctx.add_report(label + "@t=" + time_tag(t), std::move(r), t);
        }
    } else {
        const double t_end = *std::max_element(cfg.estimate.times.begin(), cfg.estimate.times.end());
        const Trajectory traj = solve(cfg, cfg.estimate.times, t_end);
        ctx.summary.audit["floor_activations"] = traj.floor_activations;
        for (double t : cfg.estimate.times) {
            EstimateReport r = matrix ? check_matrix_li_yau(traj, k, t, opts) : check_li_yau(traj, k, t, opts);
            ctx.add_report(label + "@t=" + time_tag(t), std::move(r), t);
        }
    }
    margin_series(ctx, matrix ? "matrix Li-Yau" : "Li-Yau");
}

std::vector<std::pair<Point, Point>> harnack_pairs(const ExperimentConfig &cfg, double k) {
    const EstimateBlock &e = cfg.estimate;
    const GridSpec &g = cfg.grid;
    std::vector<std::pair<Point, Point>> pairs = e.pairs;
    for (double C : e.ray) {
        const double fs = k > 0.0 ? std::sinh(k * e.s) / k : e.s;
        const double ft = k > 0.0 ? std::sinh(k * e.t) / k : e.t;
        pairs.push_back({{C * fs, 0.0, 0.0}, {C * ft, 0.0, 0.0}});
    }
    std::mt19937 rng(e.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < e.random_pairs; ++i) {
        Point x{0.0, 0.0, 0.0}, y{0.0, 0.0, 0.0};
        for (Point *p : {&x, &y}) {
            for (int a = 0; a < g.dim(); ++a) {
                // torus: anywhere; box: the middle half of each axis
                (*p)[a] = g.periodic() ? g.extent(a) * unit(rng) : g.lower(a) + g.extent(a) * (0.25 + 0.5 * unit(rng));
            }
        }
        pairs.emplace_back(x, y);
    }
    return pairs;
}

void run_harnack(Context &ctx) {
    const ExperimentConfig &cfg = ctx.cfg;
    const HypothesisAudit a = audit_stage(ctx, false);
    const EstimateBlock &e = cfg.estimate;
    const Trajectory traj = solve(cfg, {e.s, e.t}, e.t);
    CostOptions co;
    co.nodes = e.cost_nodes;
    co.seed = e.seed;
    EstimateReport r = check_harnack(traj, a.k, e.s, e.t, harnack_pairs(cfg, a.k), check_options(cfg), co);
    // One row per pair in the series: pair index, margin.
    ctx.series_header = {"pair", "log_ratio", "bound", "margin"};
    PlotSeries s{"margin", {}, {}};
    for (std::size_t i = 0; i < r.margin.size(); ++i) {
        ctx.series_rows.push_back({static_cast<double>(i), r.observed[i], r.bound[i], r.margin[i]});
        s.x.push_back(static_cast<double>(i));
        s.y.push_back(r.margin[i]);
    }
    ctx.plots.push_back({"Harnack: log margin per pair", "pair", "margin", {s}, -e.tolerance});
    ctx.plot_files.push_back("margins.svg");
    ctx.add_report("harnack", std::move(r), e.t);
}

void run_cheeger_yau(Context &ctx) {
    const ExperimentConfig &cfg = ctx.cfg;
    const HypothesisAudit a = audit_stage(ctx, false);
    const EstimateBlock &e = cfg.estimate;
    SolverConfig sc = cfg.solver;
    sc.dt = solver_dt(cfg);
    CheegerYauOptions o;
    o.check = check_options(cfg);
    o.core_fraction = e.core_fraction;
    o.cost.nodes = e.cost_nodes;
    o.cost.seed = e.seed;
    for (double t : e.times) {
        const ScalarField kernel = fundamental_solution_approx(e.x0, t, cfg.u1, cfg.u2, cfg.grid, sc, e.sigma0);
        EstimateReport r = check_cheeger_yau(kernel, e.x0, cfg.u1, cfg.u2, a.k, t, o);
        ctx.fields.emplace_back("kernel_t" + time_tag(t) + ".csv", kernel);
        ctx.add_report("cheeger_yau@t=" + time_tag(t), std::move(r), t);
    }
    margin_series(ctx, "Cheeger-Yau");
}

void run_aronson_benilan(Context &ctx) {
    const ExperimentConfig &cfg = ctx.cfg;
    const EstimateBlock &e = cfg.estimate;
    const double inf_lap = inf_laplacian(cfg.u1, cfg.grid, e.boundary_layers);
    const double k3 = e.k3.value_or(2.0 * cfg.m * inf_lap);
    ctx.summary.audit["inf_laplacian_U"] = inf_lap;
    ctx.summary.audit["k3"] = k3;
    ctx.summary.audit["k3_source"] = e.k3 ? "config" : "audit";
    const bool ok = within_slack(k3 / (2.0 * cfg.m), inf_lap);
    ctx.summary.audit["pass"] = ok;
    if (!ok) {
        throw HypothesisError("hypothesis audit failed: Delta U >= k3/(2m) does not hold (inf Delta U = " +
                              format_double(inf_lap) + ")");
    }
    SolverConfig sc = cfg.solver;
    sc.dt = solver_dt(cfg);
    sc.snapshot_times = e.times;
    sc.t_end = *std::max_element(e.times.begin(), e.times.end());
    const Trajectory traj = solve_porous_medium(initial_datum(cfg), cfg.m, cfg.u1, sc);
    ctx.summary.audit["floor_activations"] = traj.floor_activations;
    AronsonBenilanOptions o;
    o.check = check_options(cfg);
    o.support_band = e.support_band;
    o.support_factor = e.support_factor;
    o.floor = cfg.solver.floor;
    for (double t : e.times) {
        ctx.add_report("aronson_benilan@t=" + time_tag(t), check_aronson_benilan(traj, k3, t, o), t);
    }
    margin_series(ctx, "Aronson-Benilan");
}

void run_cost_compare(Context &ctx) {
    const ExperimentConfig &cfg = ctx.cfg;
    const EstimateBlock &e = cfg.estimate;
    const int n = cfg.grid.dim();
    const ComparisonAudit audit = audit_comparison(cfg.u1, cfg.u2, cfg.grid, e.boundary_layers);
    ctx.summary.audit["inf_laplacian_F"] = audit.inf_laplacian;
    ctx.summary.audit["inf_hessian_F"] = audit.inf_hessian;
    const bool lap = e.comparison != "hessian";
    const bool hess = e.comparison != "laplacian";
    const double k3_lap = e.k3.value_or(std::min(0.0, audit.inf_laplacian));
    const double k3_hess = e.k3.value_or(std::min(0.0, audit.inf_hessian));
    bool ok = true;
    if (lap) {
        ctx.summary.audit["k3_laplacian"] = k3_lap;
        ok = ok && within_slack(k3_lap, audit.inf_laplacian);
    }
    if (hess) {
        ctx.summary.audit["k3_hessian"] = k3_hess;
        ok = ok && within_slack(k3_hess, audit.inf_hessian);
    }
    ctx.summary.audit["pass"] = ok;
    if (!ok) {
        throw HypothesisError("hypothesis audit failed: Delta or hess of U2 - |grad U1|^2/2 falls below k3");
    }
    CostOptions co;
    co.nodes = e.cost_nodes;
    co.seed = e.seed;
    const CostField field = cost_field(e.x0, e.t, CostFunctional::drift(cfg.u1, cfg.u2), cfg.grid, co);
    ctx.summary.audit["nonconverged_nodes"] = field.nonconverged;
    ctx.summary.audit["multiple_minima_nodes"] = field.multiple;
    ctx.fields.emplace_back("cost_field.csv", field.value);
    ComparisonOptions o{e.tolerance, e.boundary_layers};
    if (lap) {
        ctx.add_report("laplacian_comparison", check_laplacian_comparison(field, k3_lap, n, e.t, o), e.t);
    }
    if (hess) {
        ctx.add_report("hessian_comparison", check_hessian_comparison(field, k3_hess, e.t, o), e.t);
    }
}

double radius_oracle(double a, double r0, double t) {
    // r' = -1/r + a r, so (r^2)' = -2 + 2 a r^2
    if (a == 0.0) {
        return std::sqrt(r0 * r0 - 2.0 * t);
    }
    return std::sqrt((r0 * r0 - 1.0 / a) * std::exp(2.0 * a * t) + 1.0 / a);
}

void run_flow(Context &ctx) {
    const ExperimentConfig &cfg = ctx.cfg;
    const FlowBlock &f = cfg.flow;
    const PotentialSpec &U = cfg.u1;
    const GridSpec &g = cfg.grid;
    const int layers = cfg.estimate.boundary_layers;

    HypothesisAudit a = audit_hypotheses(U, cfg.u2, g, 0.0, 2, layers);
    const double k = f.k.value_or(std::max(a.k_min_hessian, 1e-8));
    a = audit_hypotheses(U, cfg.u2, g, k, 2, layers);
    const double inf_hess_u = inf_hessian_eigenvalue(U, g, layers);
    const double K = f.K.value_or(inf_hess_u);
    const double k3 = f.k3.value_or(-a.sup_hessian_V);
    ctx.summary.audit = audit_json(a);
    ctx.summary.audit["inf_hessian_U"] = inf_hess_u;
    ctx.summary.audit["K"] = K;
    ctx.summary.audit["k3"] = k3;
    bool ok = true;
    std::string why;
    if (f.variant == HuiskenVariant::b) {
        ok = within_slack(k3, -a.sup_hessian_V);
        why = "hess(Delta U - |grad U|^2/2) >= k3 I";
    } else {
        ok = a.hessian_ok;
        why = "hess(-Delta U + |grad U|^2/2) <= k^2 I";
        if (f.variant == HuiskenVariant::weighted && !within_slack(K, inf_hess_u)) {
            ok = false;
            why = "hess U >= K I";
        }
    }
    ctx.summary.audit["pass"] = ok;
    if (!ok) {
        throw HypothesisError("hypothesis audit failed: " + why);
    }

    HuiskenParams p;
    p.variant = f.variant;
    p.k = k;
    p.K = K;
    p.k3 = k3;
    p.T = f.T;

    std::vector<double> times = f.times;
    std::sort(times.begin(), times.end());
    Trajectory ambient;
    std::function<AmbientDensity(double)> rho_at;
    if (f.ambient == "exact") {
        const double ku = -U.quadratic_part().a;
        rho_at = [ku](double tau) {
            AmbientDensity d;
            d.value = [ku, tau](const Point &x) { return flow_sharp_density(2, ku, tau, x); };
            d.gradient = [ku, tau](const Point &x) {
                const double v = flow_sharp_density(2, ku, tau, x);
                const double c = -ku / std::expm1(2.0 * ku * tau);
                return Point{v * c * x[0], v * c * x[1], 0.0};
            };
            return d;
        };
    } else {
        std::vector<double> taus;
        for (double t : times) {
            if (f.T - t > cfg.solver.t_start) {
                taus.push_back(f.T - t);
            }
        }
        ambient = solve(cfg, taus, f.T - times.front());
        ctx.summary.audit["floor_activations"] = ambient.floor_activations;
        rho_at = [&ambient, layers](double tau) { return AmbientDensity::from_field(ambient.at(tau), layers); };
    }

    const CurveState initial = f.curve == "circle" ? CurveState::circle(f.center, f.radius, f.nodes)
                                                   : CurveState::ellipse(f.center, f.a, f.b, f.nodes);
    FlowOptions fo;
    fo.dt_max = f.dt_max;
    fo.redistribute_every = f.redistribute_every;
    const std::vector<FlowSample> samples = evolve_flow(initial, U, times.front(), times, fo);
    const HuiskenSeries s = huisken_series(samples, rho_at, U, p);
    ctx.curves = samples;

    json detail;
    detail["variant"] = to_string(p.variant);
    detail["k"] = k;
    detail["K"] = K;
    detail["k3"] = k3;
    detail["T"] = f.T;
    detail["samples"] = s.t.size();
    detail["max_abs_balance"] = s.max_abs_balance;
    ctx.add_statistic("huisken_monotone", "max_slope", s.max_slope, f.tolerance, true, detail);
    if (f.expect_constant) {
        ctx.add_statistic("huisken_constant", "max_relative_drift", s.max_relative_drift, f.tolerance, true, detail);
    }
    double wl_increase = 0.0;
    for (std::size_t j = 0; j + 1 < s.weighted_length.size(); ++j) {
        wl_increase = std::max(wl_increase, s.weighted_length[j + 1] / s.weighted_length[j] - 1.0);
    }
    ctx.add_statistic("weighted_length_decreasing", "max_relative_increase", wl_increase, f.tolerance, true);

    std::vector<double> radius_error(s.t.size(), 0.0);
    if (f.radius_oracle) {
        const double au = U.quadratic_part().a;
        double worst = 0.0;
        for (std::size_t j = 0; j < samples.size(); ++j) {
            const double r = radius_oracle(au, f.radius, samples[j].t - times.front());
            for (const auto &x : samples[j].curve.nodes()) {
                const double rr = std::sqrt(norm2(x - f.center));
                radius_error[j] = std::max(radius_error[j], std::abs(rr - r) / r);
            }
            worst = std::max(worst, radius_error[j]);
        }
        ctx.add_statistic("radius_oracle", "max_relative_error", worst, f.radius_tolerance, true);
    }

    ctx.series_header = {"t", "Q", "dissipation", "slope", "balance", "weighted_length", "radius_error"};
    for (std::size_t j = 0; j < s.t.size(); ++j) {
        const bool last = j + 1 == s.t.size();
        ctx.series_rows.push_back({s.t[j], s.Q[j], s.dissipation[j], last ? std::nan("") : s.slope[j],
                                   last ? std::nan("") : s.balance[j], s.weighted_length[j], radius_error[j]});
    }
    PlotSeries q{"Q(t) / Q(0)", s.t, {}};
    for (double v : s.Q) {
        q.y.push_back(v / s.Q.front());
    }
    ctx.plots.push_back({"Huisken quantity (" + to_string(p.variant) + ")", "t", "Q / Q0", {q}, std::nullopt});
    ctx.plot_files.push_back("quantity.svg");
}

void run_volume(Context &ctx) {
    const ExperimentConfig &cfg = ctx.cfg;
    const EstimateBlock &e = cfg.estimate;
    const int n = cfg.grid.dim();
    const HypothesisAudit a = audit_hypotheses(cfg.u1, cfg.u2, cfg.grid, 0.0, n, e.boundary_layers);
    const double k3 = e.k3.value_or(std::min(0.0, -a.sup_laplacian_V));
    ctx.summary.audit = audit_json(a);
    ctx.summary.audit["k3"] = k3;
    const bool ok = within_slack(k3, -a.sup_laplacian_V);
    ctx.summary.audit["pass"] = ok;
    if (!ok) {
        throw HypothesisError("hypothesis audit failed: Delta(-V) >= k3 does not hold (inf Delta(-V) = " +
                              format_double(-a.sup_laplacian_V) + ")");
    }
    std::vector<double> snaps;
    for (int j = 0; j <= e.steps; ++j) {
        snaps.push_back(j == e.steps ? e.t1 : e.t0 + (e.t1 - e.t0) * j / e.steps);
    }
    std::vector<double> requested;
    for (double t : snaps) {
        if (t > cfg.solver.t_start) {
            requested.push_back(t);
        }
    }
    const Trajectory traj = solve(cfg, requested, e.t1);
    std::vector<Point> seeds;
    const double hs = e.seed_spacing;
    const int m = static_cast<int>(std::floor(e.seed_radius / hs));
    for (int i = -m; i <= m; ++i) {
        for (int j = (n > 1 ? -m : 0); j <= (n > 1 ? m : 0); ++j) {
            for (int l = (n > 2 ? -m : 0); l <= (n > 2 ? m : 0); ++l) {
                const Point off{i * hs, j * hs, l * hs};
                if (norm2(off) <= e.seed_radius * e.seed_radius) {
                    seeds.push_back(e.seed_center + off);
                }
            }
        }
    }
    const VolumeAudit v =
        volume_audit(traj, seeds, std::pow(hs, n), e.t0, e.t1, k3, e.tolerance, e.boundary_layers);
    json detail;
    detail["k3"] = k3;
    detail["seeds"] = seeds.size();
    detail["max_relative_drift"] = v.max_relative_drift;
    ctx.add_statistic("volume_nonincreasing", "max_relative_increase", v.max_relative_increase, e.tolerance, true,
                      detail);
    if (e.expect_constant) {
        ctx.add_statistic("volume_constant", "max_relative_drift", v.max_relative_drift, e.tolerance, true, detail);
    }
    ctx.series_header = {"t", "volume", "normalized"};
    for (std::size_t j = 0; j < v.t.size(); ++j) {
        ctx.series_rows.push_back({v.t[j], v.volume[j], v.normalized[j]});
    }
    PlotSeries s{"normalized volume", v.t, v.normalized};
    ctx.plots.push_back({"Normalized volume", "t", "vol / b^n", {s}, std::nullopt});
    ctx.plot_files.push_back("volume.svg");
}

void run_liouville(Context &ctx) {
    const ExperimentConfig &cfg = ctx.cfg;
    const EstimateBlock &e = cfg.estimate;
    const HypothesisAudit a =
        audit_hypotheses(cfg.u1, cfg.u2, cfg.grid, 0.0, cfg.grid.dim(), e.boundary_layers);
    ctx.summary.audit = audit_json(a);
    ctx.summary.audit["pass"] = a.V_nonnegative;
    const Trajectory traj = solve(cfg, {}, cfg.solver.t_end);
    LiouvilleOptions o;
    o.check = check_options(cfg);
    o.steady_tolerance = e.steady_tolerance;
    const ScalarField &rho = traj.snapshots.back().field;
    EstimateReport r = check_liouville(rho, cfg.u1, cfg.u2, o);
    ctx.fields.emplace_back("steady_state.csv", rho);
    bool constant = false;
    double ratio = 0.0;
    for (const auto &[key, v] : r.extras) {
        if (key == "constant_ratio_deviation") {
            constant = true;
            ratio = v;
        }
    }
    ctx.add_report("liouville", std::move(r), cfg.solver.t_end);
    if (constant) {
        ctx.add_statistic("liouville_constant", "ratio_deviation", ratio, e.ratio_tolerance, true);
    }
}

void write_margins(const std::string &path, const Context &ctx) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    const int d = ctx.cfg.grid.dim();
    static const char *axis[] = {"x", "y", "z"};
    os << "check";
    for (int a = 0; a < d; ++a) {
        os << ',' << axis[a];
    }
    os << ",observed,bound,margin,excluded\n";
    for (const auto &[label, r] : ctx.reports) {
        for (std::size_t i = 0; i < r.points.size(); ++i) {
            os << label;
            for (int a = 0; a < d; ++a) {
                os << ',' << format_double(r.points[i][a]);
            }
            os << ',' << format_double(r.observed[i]) << ',' << format_double(r.bound[i]) << ','
               << format_double(r.margin[i]) << ',' << int(r.excluded[i]) << '\n';
        }
    }
}

void write_series(const std::string &path, const Context &ctx) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    for (std::size_t i = 0; i < ctx.series_header.size(); ++i) {
        os << (i ? "," : "") << ctx.series_header[i];
    }
    os << '\n';
    for (const auto &row : ctx.series_rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << (std::isfinite(row[i]) ? format_double(row[i]) : std::string());
        }
        os << '\n';
    }
}

void write_curves(const std::string &path, const std::vector<FlowSample> &curves) {
    std::ofstream os(path);
    if (!os) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    os << "t,node,x,y\n";
    for (const auto &s : curves) {
        for (int i = 0; i < s.curve.size(); ++i) {
            os << format_double(s.t) << ',' << i << ',' << format_double(s.curve.node(i)[0]) << ','
               << format_double(s.curve.node(i)[1]) << '\n';
        }
    }
}

void write_artifacts(const Context &ctx, RunSummary &summary) {
    const ExperimentConfig &cfg = ctx.cfg;
    const fs::path dir(summary.directory);
    fs::create_directories(dir);
    auto note = [&](const std::string &file) { summary.artifacts.push_back((dir / file).string()); };
    if (cfg.output.csv) {
        if (!ctx.reports.empty()) {
            write_margins((dir / "margins.csv").string(), ctx);
            note("margins.csv");
        }
        if (!ctx.series_rows.empty()) {
            write_series((dir / "series.csv").string(), ctx);
            note("series.csv");
        }
        for (const auto &[file, field] : ctx.fields) {
            write_csv((dir / file).string(), field);
            note(file);
        }
        if (!ctx.curves.empty()) {
            write_curves((dir / "curves.csv").string(), ctx.curves);
            note("curves.csv");
        }
    }
    if (cfg.output.svg) {
        for (std::size_t i = 0; i < ctx.plots.size(); ++i) {
            write_svg((dir / ctx.plot_files[i]).string(), ctx.plots[i]);
            note(ctx.plot_files[i]);
        }
    }
}

void finish_exit_code(RunSummary &s) {
    if (s.exit_code != exit_pass) {
        return;
    }
    for (const auto &c : s.checks) {
        if (!c.pass) {
            s.exit_code = exit_margin_fail;
        }
    }
}

void write_summary(const RunSummary &s, const ExperimentConfig &cfg) {
    const fs::path dir(s.directory);
    fs::create_directories(dir);
    if (cfg.output.json) {
        std::ofstream os(dir / "summary.json");
        os << summary_json(s).dump(2) << '\n';
        json timing;
        timing["wall_seconds"] = s.wall_seconds;
        std::ofstream ts(dir / "timing.json");
        ts << timing.dump(2) << '\n';
    }
}

RunSummary run_single(const ExperimentConfig &cfg, const RunOptions &opts) {
    Timer timer;
    RunSummary summary;
    summary.name = cfg.name;
    summary.experiment = cfg.experiment;
    summary.config = document_json(cfg.document);
    summary.directory = opts.out_dir.empty() ? cfg.output.directory : opts.out_dir;
    Context ctx{cfg, summary, {}, {}, {}, {}, {}, {}, {}};
    try {
        const std::string &ex = cfg.experiment;
        if (ex == "liyau") {
            run_li_yau(ctx, false);
        } else if (ex == "matrix-liyau") {
            run_li_yau(ctx, true);
        } else if (ex == "harnack") {
            run_harnack(ctx);
        } else if (ex == "cheeger-yau") {
            run_cheeger_yau(ctx);
        } else if (ex == "ab") {
            run_aronson_benilan(ctx);
        } else if (ex == "cost-compare") {
            run_cost_compare(ctx);
        } else if (ex == "flow") {
            run_flow(ctx);
        } else if (ex == "volume") {
            run_volume(ctx);
        } else if (ex == "liouville") {
            run_liouville(ctx);
        } else {
            throw ConfigError("unknown experiment '" + ex + "'");
        }
    } catch (const HypothesisError &e) {
        summary.exit_code = exit_config_error;
        summary.error = std::string("hypothesis: ") + e.what();
    } catch (const ConfigError &e) {
        summary.exit_code = exit_config_error;
        summary.error = std::string("config: ") + e.what();
    } catch (const NumericalError &e) {
        summary.exit_code = exit_numerical_failure;
        summary.error = std::string("numerical: ") + e.what();
    } catch (const std::domain_error &e) {
        summary.exit_code = exit_config_error;
        summary.error = std::string("domain: ") + e.what();
    } catch (const std::invalid_argument &e) {
        summary.exit_code = exit_config_error;
        summary.error = std::string("invalid argument: ") + e.what();
    } catch (const std::out_of_range &e) {
        summary.exit_code = exit_config_error;
        summary.error = std::string("out of range: ") + e.what();
    } catch (const std::exception &e) {
        summary.exit_code = exit_numerical_failure;
        summary.error = std::string("internal: ") + e.what();
    }
    summary.incomplete = summary.exit_code == exit_config_error || summary.exit_code == exit_numerical_failure;
    finish_exit_code(summary);
    if (opts.write) {
        try {
            write_artifacts(ctx, summary);
        } catch (const std::exception &e) {
            summary.incomplete = true;
            summary.error += std::string(summary.error.empty() ? "" : "; ") + "artifacts: " + e.what();
            if (summary.exit_code == exit_pass || summary.exit_code == exit_margin_fail) {
                summary.exit_code = exit_numerical_failure;
            }
        }
    }
    summary.wall_seconds = timer.seconds();
    if (opts.write) {
        write_summary(summary, cfg);
    }
    return summary;
}

}  // namespace

json summary_json(const RunSummary &s) {
    json j;
    j["name"] = s.name;
    j["experiment"] = s.experiment;
    j["exit_code"] = s.exit_code;
    j["pass"] = s.pass();
    j["incomplete"] = s.incomplete;
    j["error"] = s.error;
    j["config"] = s.config;
    j["audit"] = s.audit;
    json checks = json::array();
    for (const auto &c : s.checks) {
        json cj;
        cj["name"] = c.name;
        cj["pass"] = c.pass;
        cj["statistic"] = c.statistic;
        cj["value"] = c.value;
        cj["threshold"] = c.threshold;
        cj["detail"] = c.detail;
        checks.push_back(cj);
    }
    j["checks"] = checks;
    json children = json::array();
    for (const auto &c : s.children) {
        json cj;
        cj["name"] = c.name;
        cj["directory"] = c.directory;
        cj["exit_code"] = c.exit_code;
        children.push_back(cj);
    }
    if (!s.children.empty()) {
        j["children"] = children;
    }
    json artifacts = json::array();
    for (const auto &a : s.artifacts) {
        artifacts.push_back(fs::path(a).filename().string());
    }
    j["artifacts"] = artifacts;
    return j;
}

RunSummary run(const ExperimentConfig &cfg, const RunOptions &opts) {
    if (cfg.experiment != "sweep") {
        return run_single(cfg, opts);
    }
    Timer timer;
    RunSummary summary;
    summary.name = cfg.name;
    summary.experiment = cfg.experiment;
    summary.config = document_json(cfg.document);
    summary.directory = opts.out_dir.empty() ? cfg.output.directory : opts.out_dir;
    std::vector<ExperimentConfig> children;
    try {
        children = expand_sweep(cfg);
    } catch (const ConfigError &e) {
        summary.exit_code = exit_config_error;
        summary.error = std::string("config: ") + e.what();
        return summary;
    }
    summary.children.resize(children.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < children.size(); i = next++) {
            RunOptions child_opts = opts;
            child_opts.out_dir.clear();
            if (!opts.out_dir.empty()) {
                child_opts.out_dir =
                    (fs::path(opts.out_dir) / fs::path(children[i].output.directory).filename()).string();
            }
            summary.children[i] = run_single(children[i], child_opts);
        }
    };
    const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(children.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }
    for (const auto &c : summary.children) {
        CheckResult r;
        r.name = c.name;
        r.pass = c.pass();
        r.statistic = "exit_code";
        r.value = c.exit_code;
        r.threshold = 0.0;
        summary.checks.push_back(r);
        summary.exit_code = std::max(summary.exit_code, c.exit_code);
        summary.incomplete = summary.incomplete || c.incomplete;
    }
    summary.wall_seconds = timer.seconds();
    if (opts.write) {
        write_summary(summary, cfg);
    }
    return summary;
}

}  // namespace hlab
