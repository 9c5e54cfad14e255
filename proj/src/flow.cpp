#include "hlab/flow.hpp"

#include "hlab/closed_forms.hpp"
#include "hlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <memory>
#include <set>
#include <stdexcept>

namespace hlab {

namespace {

double cross(const Point &a, const Point &b) { return a[0] * b[1] - a[1] * b[0]; }

double signed_area(const std::vector<Point> &p) {
    double acc = 0.0;
    const std::size_t Q = p.size();
    for (std::size_t i = 0; i < Q; ++i) {
        acc += cross(p[i], p[(i + 1) % Q]);
    }
    return 0.5 * acc;
}

}  // namespace

CurveState::CurveState(std::vector<Point> nodes) : nodes_(std::move(nodes)) {
    if (static_cast<int>(nodes_.size()) < min_nodes) {
        throw ConfigError("a curve needs at least 64 nodes");
    }
    for (auto &p : nodes_) {
        if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
            throw NumericalError("curve node is not finite");
        }
        p[2] = 0.0;
    }
    if (signed_area(nodes_) < 0.0) {
        std::reverse(nodes_.begin(), nodes_.end());
    }
    update();
}

CurveState CurveState::circle(const Point &center, double radius, int nodes) {
    return ellipse(center, radius, radius, nodes);
}

CurveState CurveState::ellipse(const Point &center, double a, double b, int nodes) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw ConfigError("ellipse semi-axes must be positive");
    }
    std::vector<Point> p(nodes);
    for (int i = 0; i < nodes; ++i) {
        const double th = 2.0 * std::numbers::pi * i / nodes;
        p[i] = {center[0] + a * std::cos(th), center[1] + b * std::sin(th), 0.0};
    }
    return CurveState(std::move(p));
}

void CurveState::update() {
    const int Q = size();
    tangent_.assign(Q, Point{});
    normal_.assign(Q, Point{});
    curvature_.assign(Q, 0.0);
    element_.assign(Q, 0.0);
    for (int i = 0; i < Q; ++i) {
        element_[i] = std::sqrt(norm2(nodes_[(i + 1) % Q] - nodes_[i]));
        if (!(element_[i] > 0.0)) {
            throw NumericalError("curve has a degenerate element");
        }
    }
    for (int i = 0; i < Q; ++i) {
        const Point &a = nodes_[(i + Q - 1) % Q];
        const Point &b = nodes_[i];
        const Point &c = nodes_[(i + 1) % Q];
        const Point chord = c - a;
        const double len = std::sqrt(norm2(chord));
        tangent_[i] = (1.0 / len) * chord;
        normal_[i] = {tangent_[i][1], -tangent_[i][0], 0.0};
        // signed curvature of the circle through a, b, c
        const double twice_area = cross(b - a, c - a);
        const double ab = element_[(i + Q - 1) % Q];
        const double bc = element_[i];
        curvature_[i] = 2.0 * twice_area / (ab * bc * len);
    }
}

double CurveState::node_weight(int i) const { return 0.5 * (element_[i] + element_[(i + size() - 1) % size()]); }

double CurveState::length() const {
    double acc = 0.0;
    for (double e : element_) {
        acc += e;
    }
    return acc;
}

double CurveState::area() const { return signed_area(nodes_); }
double CurveState::min_element() const { return *std::min_element(element_.begin(), element_.end()); }
double CurveState::max_element() const { return *std::max_element(element_.begin(), element_.end()); }

double flow_dt_limit(const CurveState &curve) {
    const double l = curve.min_element();
    return 0.2 * l * l;
}

CurveState flow_step(const CurveState &curve, const PotentialSpec &U, double dt) {
    if (U.dim() != 2) {
        throw ConfigError("curve flow needs a 2-dimensional potential");
    }
    if (!(dt > 0.0) || dt > flow_dt_limit(curve) * (1.0 + 1e-12)) {
        throw ConfigError("flow step dt = " + std::to_string(dt) + " violates the curvature limit " +
                          std::to_string(flow_dt_limit(curve)));
    }
    std::vector<Point> next(curve.size());
    for (int i = 0; i < curve.size(); ++i) {
        const Point &nu = curve.normal(i);
        const double speed = -curve.curvature(i) + dot(U.gradient(curve.node(i)), nu);
        next[i] = curve.node(i) + (dt * speed) * nu;
    }
    return CurveState(std::move(next));
}

namespace {

// Cyclic tridiagonal solve: a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i (indices mod n).
std::vector<double> cyclic_tridiagonal(const std::vector<double> &a, const std::vector<double> &b,
                                       const std::vector<double> &c, const std::vector<double> &d) {
    const int n = static_cast<int>(d.size());
    auto thomas = [n](std::vector<double> lo, std::vector<double> di, std::vector<double> up, std::vector<double> r) {
        for (int i = 1; i < n; ++i) {
            const double w = lo[i] / di[i - 1];
            di[i] -= w * up[i - 1];
            r[i] -= w * r[i - 1];
        }
        r[n - 1] /= di[n - 1];
        for (int i = n - 2; i >= 0; --i) {
            r[i] = (r[i] - up[i] * r[i + 1]) / di[i];
        }
        return r;
    };
    // Sherman-Morrison with u = (gamma, 0, ..., 0, c_{n-1}), v = (1, 0, ..., 0, a_0 / gamma)
    const double gamma = -b[0];
    std::vector<double> bb = b;
    bb[0] -= gamma;
    bb[n - 1] -= c[n - 1] * a[0] / gamma;
    const std::vector<double> x = thomas(a, bb, c, d);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = c[n - 1];
    const std::vector<double> z = thomas(a, bb, c, u);
    const double fact = (x[0] + a[0] * x[n - 1] / gamma) / (1.0 + z[0] + a[0] * z[n - 1] / gamma);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        out[i] = x[i] - fact * z[i];
    }
    return out;
}

}  // namespace

CurveState redistribute(const CurveState &curve) {
    const int Q = curve.size();
    std::vector<double> h(Q), s(Q + 1, 0.0);
    for (int i = 0; i < Q; ++i) {
        h[i] = curve.element_length(i);
        s[i + 1] = s[i] + h[i];
    }
    const double S = s[Q];
    std::vector<double> a(Q), b(Q), c(Q);
    for (int i = 0; i < Q; ++i) {
        const double hm = h[(i + Q - 1) % Q];
        a[i] = hm;
        b[i] = 2.0 * (hm + h[i]);
        c[i] = h[i];
    }
    std::array<std::vector<double>, 2> M;
    for (int ax = 0; ax < 2; ++ax) {
        std::vector<double> d(Q);
        for (int i = 0; i < Q; ++i) {
            const double hm = h[(i + Q - 1) % Q];
            const double fp = curve.node((i + 1) % Q)[ax], f0 = curve.node(i)[ax], fm = curve.node((i + Q - 1) % Q)[ax];
            d[i] = 6.0 * ((fp - f0) / h[i] - (f0 - fm) / hm);
        }
        M[ax] = cyclic_tridiagonal(a, b, c, d);
    }
    std::vector<Point> out(Q);
    int seg = 0;
    for (int j = 0; j < Q; ++j) {
        const double target = S * j / Q;
        while (seg < Q - 1 && s[seg + 1] <= target) {
            ++seg;
        }
        const int i = seg, ip = (seg + 1) % Q;
        const double hi = h[i];
        const double A = s[i + 1] - target, B = target - s[i];
        for (int ax = 0; ax < 2; ++ax) {
            const double f0 = curve.node(i)[ax], f1 = curve.node(ip)[ax];
            out[j][ax] = (A * A * A * M[ax][i] + B * B * B * M[ax][ip]) / (6.0 * hi) +
                         (f0 / hi - M[ax][i] * hi / 6.0) * A + (f1 / hi - M[ax][ip] * hi / 6.0) * B;
        }
        out[j][2] = 0.0;
    }
    return CurveState(std::move(out));
}

namespace {

bool segments_cross(const Point &p1, const Point &p2, const Point &q1, const Point &q2) {
    const double d1 = cross(q2 - q1, p1 - q1);
    const double d2 = cross(q2 - q1, p2 - q1);
    const double d3 = cross(p2 - p1, q1 - p1);
    const double d4 = cross(p2 - p1, q2 - p1);
    return ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0)) && d1 != 0.0 && d2 != 0.0 && d3 != 0.0 &&
           d4 != 0.0;
}

}  // namespace

bool self_intersecting(const CurveState &curve) {
    const int Q = curve.size();
    struct Seg {
        double lo, hi;
        int i;
    };
    std::vector<Seg> segs(Q);
    for (int i = 0; i < Q; ++i) {
        const double x0 = curve.node(i)[0], x1 = curve.node((i + 1) % Q)[0];
        segs[i] = {std::min(x0, x1), std::max(x0, x1), i};
    }
    std::sort(segs.begin(), segs.end(), [](const Seg &a, const Seg &b) { return a.lo < b.lo; });
    std::vector<Seg> active;
    for (const auto &sg : segs) {
        active.erase(std::remove_if(active.begin(), active.end(), [&](const Seg &a) { return a.hi < sg.lo; }),
                     active.end());
        for (const auto &other : active) {
            const int d = std::abs(other.i - sg.i);
            if (d <= 1 || d == Q - 1) {
                continue;  // neighbours share a node
            }
            if (segments_cross(curve.node(sg.i), curve.node((sg.i + 1) % Q), curve.node(other.i),
                               curve.node((other.i + 1) % Q))) {
                return true;
            }
        }
        active.push_back(sg);
    }
    return false;
}

double weighted_length(const CurveState &curve, const PotentialSpec &U) {
    double acc = 0.0;
    for (int i = 0; i < curve.size(); ++i) {
        acc += std::exp(-U.value(curve.node(i))) * curve.node_weight(i);
    }
    return acc;
}

std::vector<FlowSample> evolve_flow(const CurveState &initial, const PotentialSpec &U, double t0,
                                    const std::vector<double> &sample_times, const FlowOptions &opts) {
    std::set<double> targets(sample_times.begin(), sample_times.end());
    for (double t : targets) {
        if (t < t0) {
            throw ConfigError("flow sample times must be >= t0");
        }
    }
    const double stop_length = 10.0 * initial.length() / initial.size();
    CurveState curve = initial;
    double t = t0;
    std::size_t steps = 0;
    std::vector<FlowSample> out;
    for (double target : targets) {
        while (t < target) {
            double dt = std::min(opts.dt_max, opts.cfl * curve.min_element() * curve.min_element());
            if (t + dt >= target - 1e-12 * std::max(1.0, target)) {
                dt = target - t;
            }
            curve = flow_step(curve, U, dt);
            t = (t + dt >= target - 1e-12 * std::max(1.0, target)) ? target : t + dt;
            ++steps;
            if (opts.redistribute_every > 0 && steps % opts.redistribute_every == 0) {
                curve = redistribute(curve);
            }
            if (opts.intersection_check_every > 0 && steps % opts.intersection_check_every == 0 &&
                self_intersecting(curve)) {
                throw NumericalError("curve self-intersects at t = " + std::to_string(t));
            }
            if (curve.length() < stop_length) {
                throw NumericalError("curve length fell below ten element lengths at t = " + std::to_string(t));
            }
        }
        out.push_back({target, curve, steps});
    }
    return out;
}

AmbientDensity AmbientDensity::from_field(const ScalarField &rho, int layers) {
    const GridSpec &g = rho.grid();
    if (g.dim() != 2) {
        throw ConfigError("ambient density must live on a 2-dimensional grid");
    }
    const VectorField grad = hlab::gradient(rho);
    std::vector<double> gx(g.size()), gy(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        gx[i] = grad(i, 0);
        gy[i] = grad(i, 1);
    }
    auto fx = std::make_shared<ScalarField>(g, std::move(gx));
    auto fy = std::make_shared<ScalarField>(g, std::move(gy));
    auto f = std::make_shared<ScalarField>(rho);
    auto check = [g, layers](const Point &x) {
        if (g.periodic()) {
            return;
        }
        for (int a = 0; a < 2; ++a) {
            const double lo = g.lower(a) + layers * g.spacing(a);
            const double hi = g.lower(a) + (g.count(a) - 1 - layers) * g.spacing(a);
            if (x[a] < lo || x[a] > hi) {
                throw std::domain_error("curve exits the core region of the ambient grid");
            }
        }
    };
    AmbientDensity d;
    d.value = [f, check](const Point &x) {
        check(x);
        return interpolate(*f, x);
    };
    d.gradient = [fx, fy, check](const Point &x) {
        check(x);
        return Point{interpolate(*fx, x), interpolate(*fy, x), 0.0};
    };
    return d;
}

std::string to_string(HuiskenVariant variant) {
    switch (variant) {
    case HuiskenVariant::sinh:
        return "sinh";
    case HuiskenVariant::b:
        return "b";
    case HuiskenVariant::weighted:
        return "weighted";
    }
    return "weighted";
}

HuiskenVariant huisken_variant_from_string(const std::string &name) {
    if (name == "sinh") {
        return HuiskenVariant::sinh;
    }
    if (name == "b") {
        return HuiskenVariant::b;
    }
    if (name == "weighted") {
        return HuiskenVariant::weighted;
    }
    throw ConfigError("unknown Huisken variant '" + name + "' (expected sinh, b or weighted)");
}

double huisken_prefactor(const HuiskenParams &p, double tau) {
    if (!(tau > 0.0)) {
        throw std::domain_error("Huisken quantity needs t < T");
    }
    const double e = 0.5 * (p.n - p.m);
    switch (p.variant) {
    case HuiskenVariant::sinh:
        return std::pow(b_comparison(-p.k * p.k, tau), e);
    case HuiskenVariant::b:
        return std::pow(b_comparison(p.k3, tau), e);
    case HuiskenVariant::weighted:
        return std::exp(-p.K * e * tau) * std::pow(b_comparison(-p.k * p.k, tau), e);
    }
    return 0.0;
}

double curve_integral(const CurveState &curve, const AmbientDensity &rho) {
    double acc = 0.0;
    for (int i = 0; i < curve.size(); ++i) {
        acc += rho.value(curve.node(i)) * curve.node_weight(i);
    }
    return acc;
}

double huisken_quantity(const CurveState &curve, const AmbientDensity &rho_T_minus_t, const HuiskenParams &p,
                        double t) {
    return huisken_prefactor(p, p.T - t) * curve_integral(curve, rho_T_minus_t);
}

Dissipation dissipation_integrand(const CurveState &curve, const AmbientDensity &rho, const PotentialSpec &U) {
    Dissipation d;
    for (int i = 0; i < curve.size(); ++i) {
        const Point &x = curve.node(i);
        const Point &nu = curve.normal(i);
        const double r = rho.value(x);
        if (!(r > 0.0)) {
            throw NumericalError("ambient density is not positive on the curve");
        }
        const Sym3 h = U.hessian(x);
        const double hnn = h[sym_slot(0, 0)] * nu[0] * nu[0] + 2.0 * h[sym_slot(0, 1)] * nu[0] * nu[1] +
                           h[sym_slot(1, 1)] * nu[1] * nu[1];
        // normal part of grad rho / rho minus H = -kappa nu
        const double dn = dot(rho.gradient(x), nu) / r + curve.curvature(i);
        const double w = curve.node_weight(i);
        d.normal_hessian += 0.5 * r * hnn * w;
        d.deviation += r * dn * dn * w;
    }
    return d;
}

HuiskenSeries huisken_series(const std::vector<FlowSample> &samples,
                             const std::function<AmbientDensity(double)> &rho_at, const PotentialSpec &U,
                             const HuiskenParams &p) {
    HuiskenSeries s;
    for (const auto &smp : samples) {
        const double tau = p.T - smp.t;
        const AmbientDensity rho = rho_at(tau);
        const double pref = huisken_prefactor(p, tau);
        s.t.push_back(smp.t);
        s.Q.push_back(pref * curve_integral(smp.curve, rho));
        const Dissipation d = dissipation_integrand(smp.curve, rho, U);
        s.dissipation.push_back(pref * (p.variant == HuiskenVariant::weighted ? d.deviation : d.total()));
        s.weighted_length.push_back(weighted_length(smp.curve, U));
    }
    if (s.Q.empty()) {
        return s;
    }
    const double q0 = s.Q.front();
    for (std::size_t j = 0; j + 1 < s.Q.size(); ++j) {
        const double dt = s.t[j + 1] - s.t[j];
        const double slope = (s.Q[j + 1] - s.Q[j]) / (dt * q0);
        s.slope.push_back(slope);
        s.balance.push_back(slope + 0.5 * (s.dissipation[j] + s.dissipation[j + 1]) / q0);
    }
    s.max_slope = s.slope.empty() ? 0.0 : *std::max_element(s.slope.begin(), s.slope.end());
    for (double q : s.Q) {
        s.max_relative_drift = std::max(s.max_relative_drift, std::abs(q / q0 - 1.0));
    }
    for (double b : s.balance) {
        s.max_abs_balance = std::max(s.max_abs_balance, std::abs(b));
    }
    return s;
}

VolumeAudit volume_audit(const Trajectory &traj, const std::vector<Point> &seeds, double seed_volume, double t0,
                         double t1, double k3, double tolerance, int layers) {
    if (seeds.empty()) {
        throw std::invalid_argument("volume audit needs seed points");
    }
    if (!(t1 > t0)) {
        throw std::invalid_argument("volume audit needs t1 > t0");
    }
    std::vector<const Snapshot *> snaps;
    for (const auto &s : traj.snapshots) {
        if (s.time >= t0 - 1e-12 && s.time <= t1 + 1e-12) {
            snaps.push_back(&s);
        }
    }
    if (snaps.size() < 2 || std::abs(snaps.front()->time - t0) > 1e-12 || std::abs(snaps.back()->time - t1) > 1e-12) {
        throw std::invalid_argument("volume audit needs snapshots at t0 and t1");
    }
    const GridSpec &g = traj.grid();
    const int d = g.dim();
    const ScalarField u1 = traj.u1.sample(g);
    // Per snapshot: components of grad h and Delta h.
    struct Level {
        std::vector<ScalarField> X;
        ScalarField div;
    };
    std::vector<Level> levels;
    for (const auto *s : snaps) {
        const ScalarField h = (-2.0) * map(s->field, [](double v) { return std::log(v); }) - u1;
        const VectorField gh = gradient(h);
        Level lv;
        for (int a = 0; a < d; ++a) {
            std::vector<double> comp(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                comp[i] = gh(i, a);
            }
            lv.X.emplace_back(g, std::move(comp));
        }
        lv.div = laplacian(h);
        levels.push_back(std::move(lv));
    }
    auto inside = [&](const Point &x) {
        if (g.periodic()) {
            return;
        }
        for (int a = 0; a < d; ++a) {
            const double lo = g.lower(a) + layers * g.spacing(a);
            const double hi = g.lower(a) + (g.count(a) - 1 - layers) * g.spacing(a);
            if (x[a] < lo || x[a] > hi) {
                throw std::domain_error("volume audit particle left the core region");
            }
        }
    };
    auto velocity = [&](const Level &lv, const Point &x) {
        inside(x);
        Point v{0.0, 0.0, 0.0};
        for (int a = 0; a < d; ++a) {
            v[a] = interpolate(lv.X[a], x);
        }
        return v;
    };
    std::vector<Point> pos = seeds;
    std::vector<double> logj(seeds.size(), 0.0);
    VolumeAudit out;
    auto record = [&](double t) {
        double vol = 0.0;
        for (double lj : logj) {
            vol += seed_volume * std::exp(lj);
        }
        out.t.push_back(t);
        out.volume.push_back(vol);
        out.normalized.push_back(vol / std::pow(b_comparison(k3 / d, t), d));
    };
    record(snaps.front()->time);
    for (std::size_t j = 0; j + 1 < snaps.size(); ++j) {
        const double dt = snaps[j + 1]->time - snaps[j]->time;
        for (std::size_t p = 0; p < pos.size(); ++p) {
            const Point x = pos[p];
            const Point v0 = velocity(levels[j], x);
            const Point pred = x + dt * v0;
            const Point v1 = velocity(levels[j + 1], pred);
            const Point xn = x + (0.5 * dt) * (v0 + v1);
            inside(xn);
            logj[p] += 0.5 * dt * (interpolate(levels[j].div, x) + interpolate(levels[j + 1].div, xn));
            pos[p] = xn;
        }
        record(snaps[j + 1]->time);
    }
    out.nonincreasing = true;
    for (std::size_t j = 0; j + 1 < out.normalized.size(); ++j) {
        const double inc = (out.normalized[j + 1] - out.normalized[j]) / out.normalized[j];
        out.max_relative_increase = std::max(out.max_relative_increase, inc);
        if (inc > tolerance) {
            out.nonincreasing = false;
        }
    }
    for (double v : out.normalized) {
        out.max_relative_drift = std::max(out.max_relative_drift, std::abs(v / out.normalized.front() - 1.0));
    }
    return out;
}

}  // namespace hlab
