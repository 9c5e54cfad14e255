#include "hlab/action.hpp"

#include "hlab/closed_forms.hpp"
#include "hlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace hlab {

std::string to_string(CostVariant variant) {
    return variant == CostVariant::drift_form ? "drift_form" : "kinetic_plus_potential";
}

CostFunctional CostFunctional::kinetic(const PotentialSpec &u1, const PotentialSpec &u2) {
    if (u1.dim() != u2.dim()) {
        throw ConfigError("cost functional potentials differ in dimension");
    }
    return {CostVariant::kinetic_plus_potential, u1, u2, std::nullopt};
}

CostFunctional CostFunctional::drift(const PotentialSpec &u1, const PotentialSpec &u2) {
    if (u1.dim() != u2.dim()) {
        throw ConfigError("cost functional potentials differ in dimension");
    }
    return {CostVariant::drift_form, u1, u2, std::nullopt};
}

PathCurve PathCurve::straight(const Point &a, const Point &b, double s, double t, int nodes) {
    if (nodes < 3) {
        throw std::invalid_argument("a path needs at least 3 nodes");
    }
    if (!(t > s)) {
        throw std::domain_error("path requires t > s");
    }
    PathCurve p;
    p.s = s;
    p.t = t;
    p.x.resize(nodes);
    for (int i = 0; i < nodes; ++i) {
        const double w = static_cast<double>(i) / (nodes - 1);
        p.x[i] = a + w * (b - a);
    }
    return p;
}

namespace {

// Node data the action needs.
struct NodeTerms {
    double potential = 0.0;  // V (kinetic) or U2 (drift)
    Point grad_potential{0.0, 0.0, 0.0};
    Point g{0.0, 0.0, 0.0};  // grad U1 (drift)
    Sym3 h{};                // hess U1 (drift)
};

NodeTerms node_terms(const CostFunctional &fn, const Point &x, bool need_grad) {
    NodeTerms n;
    if (fn.variant == CostVariant::kinetic_plus_potential) {
        n.potential = schrodinger_value(fn.u1, fn.u2, x);
        if (need_grad) {
            n.grad_potential = schrodinger_gradient(fn.u1, fn.u2, x);
        }
    } else {
        n.potential = fn.u2.value(x);
        n.g = fn.u1.gradient(x);
        if (need_grad) {
            n.grad_potential = fn.u2.gradient(x);
            n.h = fn.u1.hessian(x);
        }
    }
    return n;
}

Point mul(const Sym3 &h, const Point &v) {
    Point out{0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out[i] += h[sym_slot(i, j)] * v[j];
        }
    }
    return out;
}

double evaluate(const PathCurve &path, const CostFunctional &fn, std::vector<Point> *grad) {
    const int P = path.size();
    const double tau = path.tau();
    std::vector<NodeTerms> nodes(P);
    for (int i = 0; i < P; ++i) {
        nodes[i] = node_terms(fn, path.x[i], grad != nullptr);
    }
    double total = 0.0;
    if (grad) {
        grad->assign(P, Point{0.0, 0.0, 0.0});
    }
    for (int i = 0; i + 1 < P; ++i) {
        const Point v = (1.0 / tau) * (path.x[i + 1] - path.x[i]);
        const NodeTerms &a = nodes[i];
        const NodeTerms &b = nodes[i + 1];
        if (fn.variant == CostVariant::kinetic_plus_potential) {
            total += tau * (0.5 * norm2(v) + 0.5 * (a.potential + b.potential));
            if (grad) {
                (*grad)[i] = (*grad)[i] - v + (0.5 * tau) * a.grad_potential;
                (*grad)[i + 1] = (*grad)[i + 1] + v + (0.5 * tau) * b.grad_potential;
            }
        } else {
            const Point ea = v - a.g;
            const Point eb = v - b.g;
            total += tau * (0.25 * norm2(ea) + 0.25 * norm2(eb) - 0.5 * (a.potential + b.potential));
            if (grad) {
                // d/dx_i and d/dx_{i+1} of tau*(|v-g_a|^2/4 + |v-g_b|^2/4 - (U2_a+U2_b)/2)
                const Point dv = 0.5 * (ea + eb);
                (*grad)[i] = (*grad)[i] - dv - (0.5 * tau) * mul(a.h, ea) - (0.5 * tau) * a.grad_potential;
                (*grad)[i + 1] = (*grad)[i + 1] + dv - (0.5 * tau) * mul(b.h, eb) - (0.5 * tau) * b.grad_potential;
            }
        }
    }
    if (grad) {
        (*grad)[0] = Point{0.0, 0.0, 0.0};
        (*grad)[P - 1] = Point{0.0, 0.0, 0.0};
    }
    return total;
}

double max_norm(const std::vector<Point> &g, int d) {
    double m = 0.0;
    for (const auto &p : g) {
        for (int a = 0; a < d; ++a) {
            m = std::max(m, std::abs(p[a]));
        }
    }
    return m;
}

// Solves tridiag(-1, 2, -1) z = r per coordinate on the interior nodes.
void thomas_inplace(std::vector<Point> &r, int d) {
    const int P = static_cast<int>(r.size());
    const int m = P - 2;
    if (m <= 0) {
        return;
    }
    std::vector<double> c(m);
    for (int a = 0; a < d; ++a) {
        double denom = 2.0;
        c[0] = -1.0 / denom;
        r[1][a] /= denom;
        for (int i = 1; i < m; ++i) {
            denom = 2.0 + c[i - 1];
            c[i] = -1.0 / denom;
            r[i + 1][a] = (r[i + 1][a] + r[i][a]) / denom;
        }
        for (int i = m - 2; i >= 0; --i) {
            r[i + 1][a] -= c[i] * r[i + 2][a];
        }
    }
}

// H^1 inner product s^T M s with M = tridiag(-1, 2, -1) / tau on interior nodes.
double h1_inner(const std::vector<Point> &s, int d, double tau) {
    const int P = static_cast<int>(s.size());
    double acc = 0.0;
    for (int i = 0; i + 1 < P; ++i) {
        for (int a = 0; a < d; ++a) {
            const double diff = s[i + 1][a] - s[i][a];
            acc += diff * diff;
        }
    }
    return acc / tau;
}

double dot_all(const std::vector<Point> &a, const std::vector<Point> &b, int d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (int k = 0; k < d; ++k) {
            acc += a[i][k] * b[i][k];
        }
    }
    return acc;
}

// Preconditioned Barzilai-Borwein descent with nonmonotone Armijo backtracking.
CostResult descend(PathCurve path, const CostFunctional &fn, const CostOptions &opts) {
    const int d = fn.dim();
    const int P = path.size();
    const double tau = path.tau();
    std::vector<Point> g, g_new, dir(P), s(P), y(P);
    double f = evaluate(path, fn, &g);
    std::deque<double> recent{f};
    constexpr int memory = 10;
    double alpha = 1.0;
    CostResult res;
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (max_norm(g, d) <= opts.tolerance) {
            res.converged = true;
            break;
        }
        // dir = -M^{-1} g = -tau T^{-1} g
        for (int i = 0; i < P; ++i) {
            dir[i] = (-tau) * g[i];
        }
        thomas_inplace(dir, d);
        dir[0] = dir[P - 1] = Point{0.0, 0.0, 0.0};
        double slope = dot_all(g, dir, d);
        if (!(slope < 0.0)) {
            break;
        }
        const double f_ref = *std::max_element(recent.begin(), recent.end());
        double lambda = alpha;
        PathCurve trial = path;
        double f_new = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (int i = 1; i + 1 < P; ++i) {
                trial.x[i] = path.x[i] + lambda * dir[i];
            }
            f_new = evaluate(trial, fn, &g_new);
            const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f_ref));
            if (std::isfinite(f_new) && f_new <= f_ref + 1e-4 * lambda * slope + slack) {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            break;
        }
        for (int i = 0; i < P; ++i) {
            s[i] = trial.x[i] - path.x[i];
            y[i] = g_new[i] - g[i];
        }
        const double sy = dot_all(s, y, d);
        const double sms = h1_inner(s, d, tau);
        alpha = (sy > 0.0 && sms > 0.0) ? std::clamp(sms / sy, 1e-8, 1e8) : 1.0;
        path = std::move(trial);
        g.swap(g_new);
        f = f_new;
        recent.push_back(f);
        if (static_cast<int>(recent.size()) > memory) {
            recent.pop_front();
        }
    }
    res.value = f;
    res.gradient_norm = max_norm(g, d);
    res.converged = res.gradient_norm <= opts.tolerance;
    res.iterations = it;
    res.euler_lagrange_residual = res.gradient_norm / tau;
    res.path = std::move(path);
    return res;
}

double path_distance(const PathCurve &a, const PathCurve &b) {
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        m = std::max(m, std::sqrt(norm2(a.x[i] - b.x[i])));
    }
    return m;
}

// Rigorous lower bound of V for torus pruning (trig and constant terms only).
double kinetic_potential_lower_bound(const CostFunctional &fn) {
    double lb = 0.0;
    const int d = fn.dim();
    auto wave2 = [d](const TrigTerm &t) {
        double w2 = 0.0;
        for (int a = 0; a < d; ++a) {
            const double w = 2.0 * std::numbers::pi * t.mode[a] / t.period[a];
            w2 += w * w;
        }
        return w2;
    };
    for (const auto &term : fn.u1.terms()) {
        if (const auto *t = std::get_if<TrigTerm>(&term)) {
            lb -= std::abs(t->amplitude) * wave2(*t);
        } else if (const auto *q = std::get_if<QuadraticTerm>(&term)) {
            lb += q->a * d;
        } else if (std::get<GaussianBumpTerm>(term).amplitude != 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
    }
    for (const auto &term : fn.u2.terms()) {
        if (const auto *t = std::get_if<TrigTerm>(&term)) {
            lb -= 2.0 * std::abs(t->amplitude);
        } else if (const auto *q = std::get_if<QuadraticTerm>(&term)) {
            lb -= 2.0 * q->c;
        } else if (std::get<GaussianBumpTerm>(term).amplitude != 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
    }
    return lb;
}

CostResult minimize_direct(const Point &x, const Point &y, double s, double t, const CostFunctional &fn,
                           const CostOptions &opts, const PathCurve *warm) {
    const int d = fn.dim();
    std::vector<CostResult> found;
    auto run = [&](PathCurve start) {
        start.x.front() = x;
        start.x.back() = y;
        found.push_back(descend(std::move(start), fn, opts));
    };
    const PathCurve line = PathCurve::straight(x, y, s, t, opts.nodes);
    if (warm && warm->size() == opts.nodes) {
        PathCurve w = *warm;
        w.s = s;
        w.t = t;
        run(std::move(w));
    }
    run(line);
    if (!fn.quadratic() && opts.restarts > 0) {
        std::mt19937 rng(opts.seed);
        std::normal_distribution<double> normal;
        const Point chord = y - x;
        const double len = std::sqrt(norm2(chord));
        const double amp = 0.5 * std::max(len, 1.0);
        for (int r = 0; r < opts.restarts; ++r) {
            Point e{0.0, 0.0, 0.0};
            if (d == 1) {
                e[0] = (r % 2 == 0) ? 1.0 : -1.0;
            } else if (r < 2 && len > 0.0) {
                // perpendicular to the chord in the first coordinate plane it spans
                Point perp{-chord[1], chord[0], 0.0};
                if (norm2(perp) == 0.0) {
                    perp = {0.0, -chord[2], chord[1]};
                }
                e = (r == 0 ? 1.0 : -1.0) / std::sqrt(norm2(perp)) * perp;
            } else {
                for (int a = 0; a < d; ++a) {
                    e[a] = normal(rng);
                }
                const double en = std::sqrt(norm2(e));
                e = (en > 0.0 ? 1.0 / en : 0.0) * e;
            }
            PathCurve start = line;
            for (int i = 1; i + 1 < start.size(); ++i) {
                const double w = std::sin(std::numbers::pi * i / (start.size() - 1));
                start.x[i] = start.x[i] + (amp * w) * e;
            }
            run(std::move(start));
        }
    }
    // Least value among converged runs; fall back to least value overall.
    auto better = [](const CostResult &a, const CostResult &b) {
        if (a.converged != b.converged) {
            return a.converged;
        }
        return a.value < b.value;
    };
    auto best_it = std::min_element(found.begin(), found.end(), better);
    CostResult best = *best_it;
    std::vector<const PathCurve *> distinct{&best.path};
    const double scale = std::max(1.0, std::abs(best.value));
    for (const auto &r : found) {
        if (!r.converged || r.value > best.value + 1e-6 * scale) {
            continue;
        }
        bool same = false;
        for (const auto *p : distinct) {
            if (path_distance(*p, r.path) <= 1e-3 * std::max(1.0, std::sqrt(norm2(y - x)))) {
                same = true;
                break;
            }
        }
        if (!same) {
            distinct.push_back(&r.path);
        }
    }
    best.multiplicity = static_cast<int>(distinct.size());
    return best;
}

}  // namespace

double action_value(const PathCurve &path, const CostFunctional &fn) { return evaluate(path, fn, nullptr); }

std::vector<Point> action_gradient(const PathCurve &path, const CostFunctional &fn) {
    std::vector<Point> g;
    evaluate(path, fn, &g);
    return g;
}

CostResult minimize_cost(const Point &x, const Point &y, double s, double t, const CostFunctional &fn,
                         const CostOptions &opts, const PathCurve *warm) {
    if (!(t > s)) {
        throw std::domain_error("minimize_cost requires t > s");
    }
    if (opts.nodes < 3) {
        throw std::invalid_argument("minimize_cost needs at least 3 path nodes");
    }
    if (!fn.torus) {
        return minimize_direct(x, y, s, t, fn, opts, warm);
    }
    // Torus: minimum over images y + L m, m in {-1,0,1}^d around the minimal image.
    const GridSpec &g = *fn.torus;
    const int d = g.dim();
    Point base = y;
    for (int a = 0; a < d; ++a) {
        const double L = g.extent(a);
        base[a] = x[a] + (y[a] - x[a]) - L * std::round((y[a] - x[a]) / L);
    }
    std::vector<Point> images;
    const int total = static_cast<int>(std::pow(3, d));
    for (int c = 0; c < total; ++c) {
        Point p = base;
        int code = c;
        for (int a = 0; a < d; ++a) {
            p[a] += g.extent(a) * ((code % 3) - 1);
            code /= 3;
        }
        images.push_back(p);
    }
    std::sort(images.begin(), images.end(),
              [&](const Point &a, const Point &b) { return norm2(a - x) < norm2(b - x); });
    const double T = t - s;
    const double vlb = fn.variant == CostVariant::kinetic_plus_potential ? kinetic_potential_lower_bound(fn)
                                                                         : -std::numeric_limits<double>::infinity();
    std::optional<CostResult> best;
    int ties = 0;
    for (const auto &img : images) {
        if (best && std::isfinite(vlb) && norm2(img - x) / (2.0 * T) + T * vlb > best->value) {
            continue;
        }
        CostResult r = minimize_direct(x, img, s, t, fn, opts, nullptr);
        if (!best || (r.converged && r.value < best->value)) {
            const bool tie = best && std::abs(r.value - best->value) <= 1e-6 * std::max(1.0, std::abs(r.value));
            ties = tie ? ties + 1 : 0;
            best = std::move(r);
        } else if (std::abs(r.value - best->value) <= 1e-6 * std::max(1.0, std::abs(best->value))) {
            ++ties;
        }
    }
    best->multiplicity += ties;
    return *best;
}

CostField cost_field(const Point &x0, double t, const CostFunctional &fn, const GridSpec &grid,
                     const CostOptions &opts, const std::vector<char> *active) {
    if (fn.dim() != grid.dim()) {
        throw ConfigError("cost functional dimension does not match the grid");
    }
    if (active && active->size() != grid.size()) {
        throw std::invalid_argument("cost_field mask size does not match the grid");
    }
    CostField out;
    out.fn = fn;
    out.x0 = x0;
    out.t = t;
    out.value = ScalarField(grid);
    out.terminal_velocity = VectorField(grid);
    out.flagged.assign(grid.size(), 0);
    const int n0 = grid.count(0);
    const auto rows = static_cast<long long>(grid.row_count());
    std::size_t nonconverged = 0, multiple = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : nonconverged, multiple)
    for (long long r = 0; r < rows; ++r) {
        std::optional<PathCurve> prev;
        Point prev_y{};
        for (int i = 0; i < n0; ++i) {
            const std::size_t node = static_cast<std::size_t>(r) * n0 + i;
            if (active && !(*active)[node]) {
                out.flagged[node] = 1;
                prev.reset();
                continue;
            }
            const Point y = grid.node(node);
            std::optional<PathCurve> warm;
            if (prev && !fn.torus) {
                // shift the neighbour's minimizer onto the new endpoint
                warm = *prev;
                const Point dy = y - prev_y;
                for (int k = 0; k < warm->size(); ++k) {
                    warm->x[k] = warm->x[k] + (static_cast<double>(k) / (warm->size() - 1)) * dy;
                }
            }
            CostResult res = minimize_cost(x0, y, 0.0, t, fn, opts, warm ? &*warm : nullptr);
            out.value[node] = res.value;
            const int P = res.path.size();
            const double tau = res.path.tau();
            const Point vt = (1.0 / (2.0 * tau)) * (3.0 * res.path.x[P - 1] - 4.0 * res.path.x[P - 2] + res.path.x[P - 3]);
            for (int a = 0; a < grid.dim(); ++a) {
                out.terminal_velocity(node, a) = vt[a];
            }
            if (!res.converged) {
                ++nonconverged;
                out.flagged[node] = 1;
            }
            if (res.multiplicity > 1) {
                ++multiple;
                out.flagged[node] = 1;
            }
            prev = std::move(res.path);
            prev_y = y;
        }
    }
    out.nonconverged = nonconverged;
    out.multiple = multiple;
    out.value.check_finite("cost field");
    return out;
}

ScalarField hj_residual(const std::vector<std::pair<double, ScalarField>> &costs, const PotentialSpec &u1,
                        const PotentialSpec &u2) {
    if (costs.size() < 3) {
        throw std::invalid_argument("hj_residual needs at least 3 time levels");
    }
    const GridSpec &grid = costs.front().second.grid();
    for (const auto &[t, f] : costs) {
        if (f.grid() != grid) {
            throw std::invalid_argument("hj_residual time levels live on different grids");
        }
    }
    const std::size_t j = costs.size() / 2;
    const double t0 = costs[j - 1].first, t1 = costs[j].first, t2 = costs[j + 1].first;
    const double h1 = t1 - t0, h2 = t2 - t1;
    if (!(h1 > 0.0) || !(h2 > 0.0)) {
        throw std::invalid_argument("hj_residual time levels must increase");
    }
    const double wm = -h2 / (h1 * (h1 + h2));
    const double w0 = (h2 - h1) / (h1 * h2);
    const double wp = h1 / (h2 * (h1 + h2));
    const ScalarField &f = costs[j].second;
    const VectorField gf = gradient(f);
    ScalarField out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.node(i);
        const double ft = wm * costs[j - 1].second[i] + w0 * f[i] + wp * costs[j + 1].second[i];
        const Point g = gf.at(i);
        out[i] = ft + 0.5 * norm2(g) + dot(u1.gradient(x), g) + u2.value(x);
    }
    return out;
}

namespace {

// Boundary layers plus every node whose 3^d stencil block touches a flagged node.
std::vector<char> comparison_exclusions(const CostField &cost, int layers) {
    const GridSpec &g = cost.value.grid();
    std::vector<char> ex(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.interior(i, layers)) {
            ex[i] = 1;
            continue;
        }
        const auto ijk = g.unravel(i);
        const int span[3] = {1, g.dim() > 1 ? 1 : 0, g.dim() > 2 ? 1 : 0};
        for (int c = -span[2]; c <= span[2] && !ex[i]; ++c) {
            for (int b = -span[1]; b <= span[1] && !ex[i]; ++b) {
                for (int a = -span[0]; a <= span[0] && !ex[i]; ++a) {
                    int q[3] = {ijk[0] + a, ijk[1] + b, ijk[2] + c};
                    for (int ax = 0; ax < g.dim(); ++ax) {
                        if (g.periodic()) {
                            q[ax] = (q[ax] % g.count(ax) + g.count(ax)) % g.count(ax);
                        } else {
                            q[ax] = std::clamp(q[ax], 0, g.count(ax) - 1);
                        }
                    }
                    if (cost.flagged[g.index(q[0], q[1], q[2])]) {
                        ex[i] = 1;
                    }
                }
            }
        }
    }
    return ex;
}

ComparisonAudit comparison_audit(const CostField &cost, int layers) {
    const GridSpec &g = cost.value.grid();
    if (cost.fn.variant == CostVariant::drift_form) {
        return audit_comparison(cost.fn.u1, cost.fn.u2, g, layers);
    }
    // L = |v|^2/2 + V is the drift form with U1 = 0, U2 = -V.
    const SchrodingerFields s = schrodinger_potential(cost.fn.u1, cost.fn.u2, g);
    ComparisonAudit a;
    a.inf_laplacian = inf_interior((-1.0) * s.lapV, layers);
    a.inf_hessian = inf_interior(min_eigenvalue_field((-1.0) * s.hessV), layers);
    return a;
}

}  // namespace

EstimateReport check_laplacian_comparison(const CostField &cost, double k3, int n, double t,
                                          const ComparisonOptions &opts) {
    const GridSpec &g = cost.value.grid();
    const ComparisonAudit audit = comparison_audit(cost, opts.boundary_layers);
    if (!within_slack(k3, audit.inf_laplacian)) {
        throw HypothesisError("Laplacian comparison hypothesis fails: inf Delta(U2 - |grad U1|^2/2) = " +
                              std::to_string(audit.inf_laplacian) + " < k3 = " + std::to_string(k3));
    }
    const double bound = n * a_comparison(k3 / n, t);
    const ScalarField lap = laplacian(cost.value);
    const auto ex = comparison_exclusions(cost, opts.boundary_layers);
    EstimateReport r;
    r.name = "laplacian_comparison";
    r.params = {{"k3", k3}, {"n", static_cast<double>(n)}, {"t", t}};
    r.tolerance = opts.tolerance;
    r.dim = g.dim();
    for (std::size_t i = 0; i < g.size(); ++i) {
        r.add(g.node(i), lap[i], bound, bound - lap[i], ex[i]);
    }
    r.extras = {{"audit_inf_laplacian", audit.inf_laplacian},
                {"nonconverged", static_cast<double>(cost.nonconverged)},
                {"multiple_minima", static_cast<double>(cost.multiple)}};
    r.finalize();
    return r;
}

EstimateReport check_hessian_comparison(const CostField &cost, double k3, double t, const ComparisonOptions &opts) {
    const GridSpec &g = cost.value.grid();
    const ComparisonAudit audit = comparison_audit(cost, opts.boundary_layers);
    if (!within_slack(k3, audit.inf_hessian)) {
        throw HypothesisError("Hessian comparison hypothesis fails: inf lambda_min hess(U2 - |grad U1|^2/2) = " +
                              std::to_string(audit.inf_hessian) + " < k3 = " + std::to_string(k3));
    }
    const double bound = a_comparison(k3, t);
    const ScalarField top = max_eigenvalue_field(hessian(cost.value));
    const auto ex = comparison_exclusions(cost, opts.boundary_layers);
    EstimateReport r;
    r.name = "hessian_comparison";
    r.params = {{"k3", k3}, {"t", t}};
    r.tolerance = opts.tolerance;
    r.dim = g.dim();
    for (std::size_t i = 0; i < g.size(); ++i) {
        r.add(g.node(i), top[i], bound, bound - top[i], ex[i]);
    }
    r.extras = {{"audit_inf_hessian", audit.inf_hessian},
                {"nonconverged", static_cast<double>(cost.nonconverged)},
                {"multiple_minima", static_cast<double>(cost.multiple)}};
    r.finalize();
    return r;
}

}  // namespace hlab
