#include "random_fields.hpp"

#include "hlab/closed_forms.hpp"
#include "hlab/errors.hpp"
#include "hlab/pde.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace hlab;

namespace {

constexpr double twopi = 2.0 * std::numbers::pi;

SolverConfig config(double dt, double t0, double t1, std::vector<double> times = {}) {
    SolverConfig c;
    c.dt = dt;
    c.t_start = t0;
    c.t_end = t1;
    c.snapshot_times = std::move(times);
    return c;
}

double max_abs_error(const ScalarField &f, const std::function<double(const Point &)> &exact, int layers) {
    double e = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f.grid().interior(i, layers)) {
            e = std::max(e, std::abs(f[i] - exact(f.grid().node(i))));
        }
    }
    return e;
}

}  // namespace

TEST_CASE("explicit step limit") {
    const GridSpec g(2, {1.0, 2.0, 1.0}, {10, 10, 1}, Topology::periodic);
    const double hx = 0.1, hy = 0.2;
    CHECK(explicit_dt_limit(g) == doctest::Approx(0.25 / (1 / (hx * hx) + 1 / (hy * hy))));
    const ScalarField rho(g, 1.0);
    CHECK_THROWS_AS(solve_linear(rho, PotentialSpec::zero(2), PotentialSpec::zero(2),
                                 config(2.0 * explicit_dt_limit(g), 0.0, 0.1)),
                    ConfigError);
    SolverConfig imex = config(2.0 * explicit_dt_limit(g), 0.0, 0.1);
    imex.scheme = Scheme::imex;
    CHECK_NOTHROW(solve_linear(rho, PotentialSpec::zero(2), PotentialSpec::zero(2), imex));
}

TEST_CASE("solver input validation") {
    const GridSpec g = GridSpec::uniform(1, 1.0, 16, Topology::periodic);
    const auto zero = PotentialSpec::zero(1);
    CHECK_THROWS_AS(solve_linear(ScalarField(g, 1.0), zero, zero, config(1e-4, 0.5, 0.5)), ConfigError);
    CHECK_THROWS_AS(solve_linear(ScalarField(g, 1.0), zero, zero, config(0.0, 0.0, 0.5)), ConfigError);
    CHECK_THROWS_AS(solve_linear(ScalarField(g, 1.0), zero, zero, config(1e-4, 0.0, 0.5, {0.7})), ConfigError);
    CHECK_THROWS_AS(solve_linear(ScalarField(g, -1.0), zero, zero, config(1e-4, 0.0, 0.5)), ConfigError);
    CHECK_THROWS_AS(scheme_from_string("rk4"), ConfigError);
}

TEST_CASE("snapshots land on requested times") {
    const GridSpec g = GridSpec::uniform(1, 1.0, 16, Topology::periodic);
    const auto zero = PotentialSpec::zero(1);
    const auto tr = solve_linear(ScalarField(g, 1.0), zero, zero, config(5e-4, 0.0, 0.3, {0.1, 0.2}));
    CHECK(tr.has(0.0));
    CHECK(tr.has(0.1));
    CHECK(tr.has(0.2));
    CHECK(tr.has(0.3));
    CHECK_FALSE(tr.has(0.15));
    CHECK_THROWS_AS(tr.at(0.15), std::out_of_range);
    CHECK(tr.snapshots.front().time == 0.0);
}

TEST_CASE("property: heat flow on the torus conserves mass and obeys the maximum principle") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 8; ++trial) {
        const int d = 1 + trial % 2;
        const GridSpec g = GridSpec::uniform(d, twopi, 24, Topology::periodic);
        const ScalarField rho0 = testing::random_field(g, rng, 0.5, 2.0);
        for (Scheme s : {Scheme::explicit_euler, Scheme::imex}) {
            SolverConfig c = config(s == Scheme::imex ? 5e-3 : explicit_dt_limit(g), 0.0, 0.2);
            c.scheme = s;
            const auto tr = solve_linear(rho0, PotentialSpec::zero(d), PotentialSpec::zero(d), c);
            const auto &rho = tr.snapshots.back().field;
            CHECK(integrate(rho) == doctest::Approx(integrate(rho0)).epsilon(1e-10));
            const auto [lo0, hi0] = std::minmax_element(rho0.values().begin(), rho0.values().end());
            const auto [lo, hi] = std::minmax_element(rho.values().begin(), rho.values().end());
            CHECK(*lo >= *lo0 - 1e-12);
            CHECK(*hi <= *hi0 + 1e-12);
        }
    }
}

TEST_CASE("property: drift equation conserves the e^{U1}-weighted mass when U2 = Delta U1") {
    // With U2 = Delta U1 the equation is rho' = div(grad rho + rho grad U1): mass is conserved.
    std::mt19937 rng(4);
    const GridSpec g = GridSpec::uniform(1, twopi, 64, Topology::periodic);
    const auto u1 = PotentialSpec::trig(1, 0.4, {1, 0, 0}, 0.2, {twopi, 1.0, 1.0});
    const ScalarField rho0 = testing::random_field(g, rng, 0.5, 1.5);
    const auto tr = solve_linear(rho0, u1, u1.laplacian_potential(), config(explicit_dt_limit(g), 0.0, 0.5));
    CHECK(integrate(tr.snapshots.back().field) == doctest::Approx(integrate(rho0)).epsilon(2e-3));
}

TEST_CASE("heat kernel evolution matches the closed form") {
    const GridSpec g = GridSpec::uniform(1, 16.0, 512, Topology::box);
    const auto rho0 = ScalarField::sample(g, [](const Point &x) { return heat_kernel(1, 0.2, x, {0.0, 0.0, 0.0}); });
    const auto tr = solve_linear(rho0, PotentialSpec::zero(1), PotentialSpec::zero(1),
                                 config(explicit_dt_limit(g), 0.2, 0.6));
    const double e = max_abs_error(tr.at(0.6), [](const Point &x) { return heat_kernel(1, 0.6, x, {0.0, 0.0, 0.0}); }, 2);
    CHECK(e < 1e-4);
}

TEST_CASE("second-order convergence for the sharp drift equation") {
    double errors[2];
    for (int j = 0; j < 2; ++j) {
        const GridSpec g = GridSpec::uniform(1, 16.0, 256 << j, Topology::box);
        const auto u1 = PotentialSpec::quadratic(1, -1.0);
        const auto rho0 = ScalarField::sample(g, [](const Point &x) { return gaussian_like_solution(1, 1.0, 0.2, x); });
        const auto tr = solve_linear(rho0, u1, PotentialSpec::zero(1), config(explicit_dt_limit(g), 0.2, 0.6));
        errors[j] = max_abs_error(tr.at(0.6), [](const Point &x) { return gaussian_like_solution(1, 1.0, 0.6, x); }, 2);
    }
    CHECK(errors[0] / errors[1] > 3.5);
}

TEST_CASE("IMEX and explicit schemes agree") {
    const GridSpec g = GridSpec::uniform(2, twopi, 32, Topology::periodic);
    const auto u1 = PotentialSpec::trig(2, 0.3, {1, 1, 0}, 0.1, {twopi, twopi, 1.0});
    const auto u2 = PotentialSpec::trig(2, 0.2, {0, 1, 0}, 0.0, {twopi, twopi, 1.0});
    const auto rho0 = ScalarField::sample(g, [](const Point &x) { return 2.0 + std::cos(x[0]) * std::sin(x[1]); });
    const auto ex = solve_linear(rho0, u1, u2, config(explicit_dt_limit(g) / 16, 0.0, 0.3));
    SolverConfig c = config(1e-4, 0.0, 0.3);
    c.scheme = Scheme::imex;
    const auto im = solve_linear(rho0, u1, u2, c);
    double diff = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        diff = std::max(diff, std::abs(ex.at(0.3)[i] - im.at(0.3)[i]));
    }
    CHECK(diff < 1e-3);
}

TEST_CASE("constant solutions are steady for U2 = 0") {
    const GridSpec g = GridSpec::uniform(2, 4.0, 16, Topology::box);
    const auto u1 = PotentialSpec::quadratic(2, -0.7, {0.2, -0.1, 0.0});
    const auto tr = solve_linear(ScalarField(g, 3.0), u1, PotentialSpec::zero(2), config(explicit_dt_limit(g), 0.0, 0.1));
    for (double v : tr.snapshots.back().field.values()) {
        CHECK(v == doctest::Approx(3.0).epsilon(1e-13));
    }
    const auto res = linear_operator(ScalarField(g, 3.0), u1, PotentialSpec::zero(2));
    for (double v : res.values()) {
        CHECK(std::abs(v) < 1e-12);
    }
}

TEST_CASE("porous medium: Barenblatt evolution and guards") {
    const GridSpec g = GridSpec::uniform(1, 16.0, 512, Topology::box);
    const BarenblattProfile b{1, 2.0, 1.0};
    const auto rho0 = ScalarField::sample(g, [&](const Point &x) { return b.value(0.5, x); });
    SolverConfig c = config(explicit_dt_limit(g), 0.5, 1.0);
    c.floor = 0.0;
    const auto tr = solve_porous_medium(rho0, 2.0, PotentialSpec::zero(1), c);
    CHECK(tr.equation == Equation::porous_medium);
    const double e = max_abs_error(tr.at(1.0), [&](const Point &x) { return b.value(1.0, x); }, 2);
    CHECK(e < 5e-3);
    CHECK(integrate(tr.at(1.0)) == doctest::Approx(integrate(rho0)).epsilon(1e-10));

    CHECK_THROWS_AS(solve_porous_medium(rho0, 2.0 / 3.0 - 1.0, PotentialSpec::zero(1), c), ConfigError);
    CHECK_THROWS_AS(solve_porous_medium(rho0, 0.5, PotentialSpec::zero(1), c), ConfigError);
}

TEST_CASE("kernel approximation") {
    const GridSpec g = GridSpec::uniform(1, 20.0, 1024, Topology::box);
    SolverConfig c;
    c.dt = explicit_dt_limit(g);
    const auto z = PotentialSpec::zero(1);
    const auto p = fundamental_solution_approx({0.0, 0.0, 0.0}, 1.0, z, z, g, c);
    CHECK(integrate(p) == doctest::Approx(1.0).epsilon(1e-6));
    const double e = max_abs_error(p, [](const Point &x) { return heat_kernel(1, 1.0, x, {0.0, 0.0, 0.0}); }, 2);
    CHECK(e < 1e-4);
    CHECK_THROWS_AS(fundamental_solution_approx({0.0, 0.0, 0.0}, 1.0, z, z, g, c, 0.01), ConfigError);
    CHECK_THROWS_AS(fundamental_solution_approx({0.0, 0.0, 0.0}, 1e-3, z, z, g, c), ConfigError);
}

TEST_CASE("minimal-image displacement") {
    const GridSpec t = GridSpec::uniform(1, 1.0, 8, Topology::periodic);
    CHECK(displacement(t, {0.9, 0.0, 0.0}, {0.1, 0.0, 0.0})[0] == doctest::Approx(-0.2));
    const GridSpec b = GridSpec::uniform(1, 1.0, 8, Topology::box);
    CHECK(displacement(b, {0.4, 0.0, 0.0}, {-0.4, 0.0, 0.0})[0] == doctest::Approx(0.8));
}
