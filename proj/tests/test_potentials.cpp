#include "hlab/errors.hpp"
#include "hlab/potentials.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hlab;

namespace {

constexpr double twopi = 2.0 * std::numbers::pi;

// Central differences of the analytic value, as an independent check of the derivatives.
Point fd_gradient(const PotentialSpec &u, const Point &x, double h = 1e-5) {
    Point g{0.0, 0.0, 0.0};
    for (int a = 0; a < u.dim(); ++a) {
        Point p = x, m = x;
        p[a] += h;
        m[a] -= h;
        g[a] = (u.value(p) - u.value(m)) / (2 * h);
    }
    return g;
}

double fd_second(const PotentialSpec &u, const Point &x, int a, int b, double h = 1e-4) {
    auto shifted = [&](double da, double db) {
        Point p = x;
        p[a] += da;
        p[b] += db;
        return u.value(p);
    };
    return (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4 * h * h);
}

PotentialSpec random_potential(std::mt19937 &rng, int d, bool torus) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> mode(-2, 2);
    PotentialSpec p(d);
    if (torus) {
        for (int j = 0; j < 3; ++j) {
            TrigTerm t;
            t.amplitude = u(rng);
            for (int a = 0; a < d; ++a) {
                t.mode[a] = mode(rng);
                t.period[a] = twopi;
            }
            t.phase = 3.0 * u(rng);
            p.add(t);
        }
    } else {
        auto vec = [&] {
            Point v{0.0, 0.0, 0.0};
            for (int a = 0; a < d; ++a) {
                v[a] = u(rng);
            }
            return v;
        };
        p.add(QuadraticTerm{u(rng), vec(), u(rng)});
        for (int j = 0; j < 2; ++j) {
            p.add(GaussianBumpTerm{u(rng), vec(), 0.5 + std::abs(u(rng))});
        }
    }
    return p;
}

}  // namespace

TEST_CASE("quadratic potential values") {
    const auto u = PotentialSpec::quadratic(2, -1.0, {0.5, 0.0, 0.0}, 2.0);
    CHECK(u.value({1.0, 2.0, 0.0}) == doctest::Approx(-2.5 + 0.5 + 2.0));
    CHECK(u.laplacian({3.0, 1.0, 0.0}) == doctest::Approx(-2.0));
    CHECK(u.is_quadratic());
    CHECK(u.quadratic_part().a == -1.0);
    CHECK_FALSE(u.is_zero());
    CHECK(PotentialSpec::zero(3).is_zero());
}

TEST_CASE("property: analytic derivatives agree with finite differences") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 60; ++trial) {
        const int d = 1 + trial % 3;
        const PotentialSpec p = random_potential(rng, d, trial % 2 == 0);
        Point x{0.0, 0.0, 0.0};
        for (int a = 0; a < d; ++a) {
            x[a] = u(rng);
        }
        const Point g = p.gradient(x);
        const Point gf = fd_gradient(p, x);
        const Sym3 h = p.hessian(x);
        double lap = 0.0;
        for (int a = 0; a < d; ++a) {
            CHECK(g[a] == doctest::Approx(gf[a]).epsilon(1e-7).scale(1.0));
            for (int b = a; b < d; ++b) {
                CHECK(h[sym_slot(a, b)] == doctest::Approx(fd_second(p, x, a, b)).epsilon(1e-5).scale(1.0));
            }
            lap += h[sym_slot(a, a)];
        }
        CHECK(p.laplacian(x) == doctest::Approx(lap).epsilon(1e-12).scale(1.0));
        for (int a = d; a < 3; ++a) {
            CHECK(g[a] == 0.0);
        }
    }
}

TEST_CASE("laplacian_potential reproduces Delta U") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, twopi);
    PotentialSpec p = PotentialSpec::trig(2, 0.4, {1, 2, 0}, 0.3, {twopi, twopi, 1.0}) +
                      PotentialSpec::quadratic(2, 0.0, {0.0, 0.0, 0.0}, 5.0);
    const PotentialSpec lp = p.laplacian_potential();
    for (int i = 0; i < 20; ++i) {
        const Point x{u(rng), u(rng), 0.0};
        CHECK(lp.value(x) == doctest::Approx(p.laplacian(x)).epsilon(1e-12).scale(1.0));
    }
    CHECK_THROWS(PotentialSpec::gaussian_bump(1, 1.0, {0.0, 0.0, 0.0}, 1.0).laplacian_potential());
}

TEST_CASE("Schrodinger potential V = Delta U1 + |grad U1|^2/2 - 2 U2") {
    const auto u1 = PotentialSpec::quadratic(2, -1.5);
    const auto u2 = PotentialSpec::quadratic(2, 0.0, {0.0, 0.0, 0.0}, 0.25);
    const Point x{0.3, -0.4, 0.0};
    CHECK(schrodinger_value(u1, u2, x) == doctest::Approx(-3.0 + 0.5 * 2.25 * 0.25 - 0.5));
    const Point gv = schrodinger_gradient(u1, u2, x);
    CHECK(gv[0] == doctest::Approx(2.25 * 0.3));
    CHECK(gv[1] == doctest::Approx(2.25 * -0.4));
}

TEST_CASE("audit for U1 = -k|x|^2/2 gives the sharp constant") {
    const GridSpec g = GridSpec::uniform(2, 4.0, 32, Topology::box);
    for (double k : {0.5, 1.0, 2.0}) {
        const auto a = audit_hypotheses(PotentialSpec::quadratic(2, -k), PotentialSpec::zero(2), g, k, 2);
        CHECK(a.k_min_laplacian == doctest::Approx(k));
        CHECK(a.k_min_hessian == doctest::Approx(k));
        CHECK(a.laplacian_ok);
        CHECK(a.hessian_ok);
        const auto b = audit_hypotheses(PotentialSpec::quadratic(2, -k), PotentialSpec::zero(2), g, 0.9 * k, 2);
        CHECK_FALSE(b.laplacian_ok);
        CHECK_FALSE(b.hessian_ok);
    }
}

TEST_CASE("property: laplacian audit is weaker than the hessian audit") {
    std::mt19937 rng(17);
    const GridSpec g = GridSpec::uniform(2, twopi, 32, Topology::periodic);
    for (int trial = 0; trial < 20; ++trial) {
        const PotentialSpec u1 = random_potential(rng, 2, true);
        const PotentialSpec u2 = random_potential(rng, 2, true);
        const auto a = audit_hypotheses(u1, u2, g, 0.0, 2);
        CHECK(a.k_min_laplacian <= a.k_min_hessian + 1e-12);
        const auto b = audit_hypotheses(u1, u2, g, a.k_min_hessian, 2);
        CHECK(b.hessian_ok);
        CHECK(b.laplacian_ok);
    }
}

TEST_CASE("comparison audit on F = U2 - |grad U1|^2/2") {
    const GridSpec g = GridSpec::uniform(2, 4.0, 32, Topology::box);
    const auto a = audit_comparison(PotentialSpec::zero(2), PotentialSpec::quadratic(2, -1.0), g);
    CHECK(a.inf_laplacian == doctest::Approx(-2.0));
    CHECK(a.inf_hessian == doctest::Approx(-1.0));
    const auto b = audit_comparison(PotentialSpec::quadratic(2, 1.0), PotentialSpec::zero(2), g);
    CHECK(b.inf_laplacian == doctest::Approx(-2.0));
    CHECK(inf_laplacian(PotentialSpec::quadratic(2, 0.5), g) == doctest::Approx(1.0));
    CHECK(inf_hessian_eigenvalue(PotentialSpec::quadratic(2, 0.5), g) == doctest::Approx(0.5));
}

TEST_CASE("admissibility on grids") {
    const GridSpec box = GridSpec::uniform(2, 4.0, 16, Topology::box);
    const GridSpec torus = GridSpec::uniform(2, twopi, 16, Topology::periodic);
    CHECK_THROWS_AS(PotentialSpec::trig(2, 1.0, {1, 0, 0}, 0.0, {twopi, twopi, 1.0}).check_admissible(box),
                    ConfigError);
    CHECK_THROWS_AS(PotentialSpec::quadratic(2, 1.0).check_admissible(torus), ConfigError);
    CHECK_THROWS_AS(PotentialSpec::quadratic(1, 1.0).check_admissible(box), ConfigError);
    CHECK_NOTHROW(PotentialSpec::quadratic(2, 0.0, {0.0, 0.0, 0.0}, 3.0).check_admissible(torus));
    CHECK_NOTHROW(PotentialSpec::trig(2, 1.0, {1, 0, 0}, 0.0, {twopi, twopi, 1.0}).check_admissible(torus));
}

TEST_CASE("sampled fields match pointwise evaluation") {
    const GridSpec g = GridSpec::uniform(2, 3.0, 12, Topology::box);
    const auto u = PotentialSpec::gaussian_bump(2, 0.7, {0.2, -0.1, 0.0}, 0.8);
    const auto v = u.sample(g);
    const auto lap = u.sample_laplacian(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(v[i] == u.value(g.node(i)));
        CHECK(lap[i] == u.laplacian(g.node(i)));
    }
}
