#include "hlab/action.hpp"
#include "hlab/closed_forms.hpp"
#include "hlab/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hlab;

TEST_CASE("straight path and action of a free particle") {
    const auto fn = CostFunctional::kinetic(PotentialSpec::zero(2), PotentialSpec::zero(2));
    const auto path = PathCurve::straight({0.0, 0.0, 0.0}, {1.0, 2.0, 0.0}, 0.0, 2.0, 33);
    CHECK(path.size() == 33);
    CHECK(path.tau() == doctest::Approx(2.0 / 32));
    CHECK(action_value(path, fn) == doctest::Approx(5.0 / 4.0));
    for (const auto &g : action_gradient(path, fn)) {
        CHECK(std::abs(g[0]) < 1e-12);
    }
    CHECK_THROWS_AS(PathCurve::straight({0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, 1.0, 1.0, 10), std::domain_error);
    CHECK_THROWS_AS(CostFunctional::kinetic(PotentialSpec::zero(1), PotentialSpec::zero(2)), ConfigError);
}

TEST_CASE("property: action gradient matches finite differences") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    const auto u1 = PotentialSpec::gaussian_bump(2, 0.4, {0.2, 0.1, 0.0}, 0.7) + PotentialSpec::quadratic(2, -0.5);
    const auto u2 = PotentialSpec::gaussian_bump(2, -0.2, {-0.3, 0.0, 0.0}, 0.5);
    for (const auto &fn : {CostFunctional::kinetic(u1, u2), CostFunctional::drift(u1, u2)}) {
        for (int trial = 0; trial < 5; ++trial) {
            auto path = PathCurve::straight({0.0, 0.0, 0.0}, {0.8, -0.5, 0.0}, 0.0, 1.0, 12);
            for (int i = 1; i + 1 < path.size(); ++i) {
                path.x[i][0] += u(rng);
                path.x[i][1] += u(rng);
            }
            const auto g = action_gradient(path, fn);
            const int i = 1 + trial % (path.size() - 2);
            for (int a = 0; a < 2; ++a) {
                const double h = 1e-6;
                auto p = path, m = path;
                p.x[i][a] += h;
                m.x[i][a] -= h;
                CHECK(g[i][a] == doctest::Approx((action_value(p, fn) - action_value(m, fn)) / (2 * h)).epsilon(1e-6));
            }
            CHECK(g.front()[0] == 0.0);
            CHECK(g.back()[1] == 0.0);
        }
    }
}

TEST_CASE("quadratic cost and minimizing path") {
    const double k = 1.0, t = 1.0;
    const auto fn = CostFunctional::kinetic(PotentialSpec::quadratic(1, -k), PotentialSpec::zero(1));
    for (double y : {-1.8, -0.6, 0.4, 1.8}) {
        const Point Y{y, 0.0, 0.0};
        const auto r = minimize_cost({0.0, 0.0, 0.0}, Y, 0.0, t, fn);
        CHECK(r.converged);
        CHECK(r.value == doctest::Approx(quadratic_cost(1, k, t, Y)).epsilon(1e-4));
        for (int i = 0; i < r.path.size(); ++i) {
            CHECK(r.path.x[i][0] == doctest::Approx(quadratic_minimizer(k, t, Y, r.path.time(i))[0]).epsilon(1e-4).scale(1.0));
        }
    }
}

// Shooting values from tests/oracles/derive.py: L = v^2/2 + V, V = U'' + U'^2/2,
// U = 0.3 exp(-(x - 0.5)^2 / 2), from 0 at s = 0 to y at t = 1.
TEST_CASE("cost for a bump potential matches the shooting oracle") {
    const auto fn = CostFunctional::kinetic(PotentialSpec::gaussian_bump(1, 0.3, {0.5, 0.0, 0.0}, 1.0),
                                            PotentialSpec::zero(1));
    const std::pair<double, double> cases[] = {{-1.0, 0.4953225365376388},
                                               {0.7, -0.02661722009409051},
                                               {1.5, 0.9203046364466787}};
    for (const auto &[y, c] : cases) {
        const auto r = minimize_cost({0.0, 0.0, 0.0}, {y, 0.0, 0.0}, 0.0, 1.0, fn);
        CHECK(r.converged);
        CHECK(r.value == doctest::Approx(c).epsilon(1e-4).scale(1.0));
        CHECK(r.euler_lagrange_residual < 1e-3);
    }
}

TEST_CASE("property: the minimum is below perturbed paths") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    const auto fn = CostFunctional::drift(PotentialSpec::gaussian_bump(2, 0.3, {0.4, 0.2, 0.0}, 0.8),
                                          PotentialSpec::quadratic(2, -0.5));
    CostOptions o;
    o.nodes = 64;
    for (int trial = 0; trial < 10; ++trial) {
        const Point y{1.5 * u(rng) * 5, 1.5 * u(rng) * 5, 0.0};
        const auto r = minimize_cost({0.0, 0.0, 0.0}, y, 0.0, 1.0, fn, o);
        REQUIRE(r.converged);
        auto p = r.path;
        for (int i = 1; i + 1 < p.size(); ++i) {
            p.x[i][0] += u(rng) * 0.1;
            p.x[i][1] += u(rng) * 0.1;
        }
        CHECK(action_value(p, fn) >= r.value - 1e-12);
    }
}

TEST_CASE("property: cost is symmetric under time reversal for the kinetic form") {
    // L = |v|^2/2 + V(x) is reversible, so c_{0,t}(x, y) = c_{0,t}(y, x).
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto fn = CostFunctional::kinetic(PotentialSpec::gaussian_bump(2, 0.3, {0.1, 0.0, 0.0}, 0.9),
                                            PotentialSpec::zero(2));
    CostOptions o;
    o.nodes = 64;
    for (int trial = 0; trial < 6; ++trial) {
        const Point x{u(rng), u(rng), 0.0};
        const Point y{u(rng), u(rng), 0.0};
        const double a = minimize_cost(x, y, 0.0, 1.0, fn, o).value;
        const double b = minimize_cost(y, x, 0.0, 1.0, fn, o).value;
        CHECK(a == doctest::Approx(b).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("cost field and the Hamilton-Jacobi residual") {
    const GridSpec g = GridSpec::uniform(1, 4.0, 33, Topology::box);
    const auto fn = CostFunctional::drift(PotentialSpec::zero(1), PotentialSpec::quadratic(1, -1.0));
    CostOptions o;
    o.nodes = 128;
    std::vector<std::pair<double, ScalarField>> levels;
    for (double t : {0.95, 1.0, 1.05}) {
        const auto f = cost_field({0.0, 0.0, 0.0}, t, fn, g, o);
        CHECK(f.nonconverged == 0);
        CHECK(f.multiple == 0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            // the drift form drops the constant -k n t of the kinetic form
            CHECK(f.value[i] == doctest::Approx(quadratic_cost(1, 1.0, t, g.node(i)) + t).epsilon(1e-4).scale(1.0));
        }
        levels.emplace_back(t, f.value);
    }
    const auto res = hj_residual(levels, fn.u1, fn.u2);
    CHECK(std::abs(res[g.size() / 2]) < 1e-2);
    std::vector<char> mask(g.size(), 0);
    mask[5] = 1;
    const auto sparse = cost_field({0.0, 0.0, 0.0}, 1.0, fn, g, o, &mask);
    CHECK(sparse.flagged[0]);
    CHECK_FALSE(sparse.flagged[5]);
    CHECK_THROWS_AS(hj_residual({levels[0], levels[1]}, fn.u1, fn.u2), std::invalid_argument);
}

TEST_CASE("comparison checks on the sharp cost") {
    const GridSpec g = GridSpec::uniform(1, 4.0, 41, Topology::box);
    const auto fn = CostFunctional::drift(PotentialSpec::zero(1), PotentialSpec::quadratic(1, -1.0));
    const auto f = cost_field({0.0, 0.0, 0.0}, 1.0, fn, g);
    const auto lap = check_laplacian_comparison(f, -1.0, 1, 1.0);
    CHECK(lap.pass);
    CHECK(lap.max_abs_margin() < 5e-3);
    const auto hess = check_hessian_comparison(f, -1.0, 1.0);
    CHECK(hess.pass);
    CHECK_THROWS_AS(check_laplacian_comparison(f, -0.5, 1, 1.0), HypothesisError);
    // a weaker k3 still holds, with positive margin
    CHECK(check_hessian_comparison(f, -4.0, 1.0).min_margin > 0.0);
}
