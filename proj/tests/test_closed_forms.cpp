#include "hlab/closed_forms.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace hlab;

// Reference values from tests/oracles/derive.py (40-digit mpmath).
TEST_CASE("comparison functions: frozen values") {
    CHECK(a_comparison(1.0, 0.5) == doctest::Approx(1.8304877217124519).epsilon(1e-14));
    CHECK(a_comparison(-4.0, 0.3) == doctest::Approx(3.7240510427733326).epsilon(1e-14));
    CHECK(a_comparison(0.0, 0.7) == doctest::Approx(1.4285714285714286).epsilon(1e-14));
    CHECK(b_comparison(1.0, 1.0) == doctest::Approx(0.84147098480789651).epsilon(1e-14));
    CHECK(b_comparison(-4.0, 0.3) == doctest::Approx(0.31832679107412062).epsilon(1e-14));
    CHECK(b_comparison(-1.0, 0.0) == 0.0);
}

TEST_CASE("comparison functions: domain") {
    CHECK_THROWS_AS(a_comparison(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(a_comparison(-1.0, -0.5), std::domain_error);
    CHECK_THROWS_AS(a_comparison(1.0, std::numbers::pi), std::domain_error);
    CHECK_NOTHROW(a_comparison(1.0, 3.0));
}

TEST_CASE("property: a solves the Riccati equation and b' = a b") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> uk(-4.0, 4.0);
    std::uniform_real_distribution<double> ut(0.05, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const double K = trial % 10 == 0 ? 0.0 : uk(rng);
        double t = ut(rng);
        if (K > 0.0) {
            t = std::min(t, 0.9 * std::numbers::pi / std::sqrt(K));
        }
        const double h = 1e-5 * t;
        const double a = a_comparison(K, t);
        const double da = (a_comparison(K, t + h) - a_comparison(K, t - h)) / (2 * h);
        CHECK(da + a * a + K == doctest::Approx(0.0).scale(std::max(1.0, a * a)).epsilon(1e-6));
        const double db = (b_comparison(K, t + h) - b_comparison(K, t - h)) / (2 * h);
        CHECK(db == doctest::Approx(a * b_comparison(K, t)).epsilon(1e-6));
        // small-time behaviour a ~ 1/t
        CHECK(a_comparison(K, 1e-6) * 1e-6 == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("gaussian-like solution: frozen values") {
    CHECK(gaussian_like_solution(1, 1.0, 0.5, {0.3, 0.0, 0.0}) == doctest::Approx(0.48880584549859212).epsilon(1e-13));
    CHECK(gaussian_like_solution(2, 0.5, 1.2, {0.4, -0.7, 0.0}) ==
          doctest::Approx(0.1061734286281344).epsilon(1e-13));
    CHECK(heat_kernel(1, 0.5, {0.3, 0.0, 0.0}, {0.0, 0.0, 0.0}) == doctest::Approx(0.38138781546052409).epsilon(1e-14));
    CHECK(gaussian_like_solution(1, 0.0, 0.5, {0.3, 0.0, 0.0}) ==
          doctest::Approx(0.38138781546052409).epsilon(1e-14));
}

TEST_CASE("gaussian-like solution tends to the heat kernel as k -> 0") {
    for (double t : {0.2, 1.0, 3.0}) {
        for (double x : {0.0, 0.7, 2.0}) {
            const Point p{x, 0.5 * x, 0.0};
            CHECK(gaussian_like_solution(2, 1e-6, t, p) ==
                  doctest::Approx(heat_kernel(2, t, p, {0.0, 0.0, 0.0})).epsilon(1e-5));
        }
    }
}

TEST_CASE("property: gaussian-like solution satisfies rho' = Delta rho - k <x, grad rho>") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> uk(0.0, 2.0);
    std::uniform_real_distribution<double> ut(0.2, 2.0);
    std::uniform_real_distribution<double> ux(-1.5, 1.5);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 3;
        const double k = uk(rng);
        const double t = ut(rng);
        Point x{0.0, 0.0, 0.0};
        for (int a = 0; a < n; ++a) {
            x[a] = ux(rng);
        }
        const double h = 1e-3;
        auto rho = [&](double tt, const Point &y) { return gaussian_like_solution(n, k, tt, y); };
        const double r = rho(t, x);
        const double dt = (rho(t + h, x) - rho(t - h, x)) / (2 * h);
        double lap = 0.0, drift = 0.0;
        for (int a = 0; a < n; ++a) {
            Point p = x, m = x;
            p[a] += h;
            m[a] -= h;
            lap += (rho(t, p) - 2 * r + rho(t, m)) / (h * h);
            drift += x[a] * (rho(t, p) - rho(t, m)) / (2 * h);
        }
        CHECK(dt == doctest::Approx(lap - k * drift).epsilon(1e-4).scale(r));

        // closed-form log-derivatives
        const auto d = gaussian_like_derivatives(n, k, t, x);
        CHECK(d.value == doctest::Approx(r).epsilon(1e-14));
        CHECK(d.lap_log == doctest::Approx(n * d.hess_log).epsilon(1e-14));
        CHECK(d.dt_log * r == doctest::Approx(dt).epsilon(1e-4).scale(r));
        // flow density carries the extra e^{-knt}
        CHECK(flow_sharp_density(n, k, t, x) == doctest::Approx(r * std::exp(-k * n * t)).epsilon(1e-14));
    }
}

TEST_CASE("quadratic cost: frozen values and the minimizer path") {
    CHECK(quadratic_cost(2, 1.0, 1.0, {1.0, 0.5, 0.0}) == doctest::Approx(-1.1793529465629179).epsilon(1e-14));
    CHECK(quadratic_cost(1, 0.5, 2.0, {1.5, 0.0, 0.0}) == doctest::Approx(-0.26141765190662614).epsilon(1e-14));
    const Point y{1.2, -0.4, 0.0};
    const Point mid = quadratic_minimizer(1.0, 1.0, y, 0.5);
    CHECK(mid[0] == doctest::Approx(1.2 * std::sinh(0.5) / std::sinh(1.0)));
    CHECK(quadratic_minimizer(1.0, 1.0, y, 1.0)[1] == doctest::Approx(-0.4));
    CHECK(quadratic_minimizer(1.0, 1.0, y, 0.0)[0] == 0.0);
    CHECK_THROWS_AS(quadratic_cost(1, 0.0, 1.0, y), std::domain_error);
}

TEST_CASE("Barenblatt: frozen value, support and conserved mass") {
    const BarenblattProfile b{1, 2.0, 1.0};
    CHECK(b.alpha() == doctest::Approx(1.0 / 3.0));
    CHECK(b.kappa() == doctest::Approx(1.0 / 12.0));
    CHECK(b.value(2.0, {0.5, 0.0, 0.0}) == doctest::Approx(0.78328385931743307).epsilon(1e-14));
    const double r = b.support_radius(2.0);
    CHECK(b.value(2.0, {1.0001 * r, 0.0, 0.0}) == 0.0);
    CHECK(b.value(2.0, {0.999 * r, 0.0, 0.0}) > 0.0);
    // mass is constant in time: Simpson on the support
    for (double t : {0.5, 1.0, 4.0}) {
        const double R = b.support_radius(t);
        const int N = 20000;
        double s = 0.0;
        for (int i = 0; i <= N; ++i) {
            const double x = -R + 2 * R * i / N;
            const double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += w * b.value(t, {x, 0.0, 0.0});
        }
        CHECK(s * 2 * R / N / 3 == doctest::Approx(4.6188021535170061).epsilon(1e-6));
    }
}

TEST_CASE("property: Barenblatt solves rho' = (rho^m)'' inside the support") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> um(1.2, 3.0);
    std::uniform_real_distribution<double> ut(0.5, 3.0);
    std::uniform_real_distribution<double> uf(-0.8, 0.8);
    for (int trial = 0; trial < 50; ++trial) {
        const BarenblattProfile b{1, um(rng), 1.0};
        const double t = ut(rng);
        const double x = uf(rng) * b.support_radius(t);
        const double h = 1e-4;
        auto p = [&](double tt, double xx) { return std::pow(b.value(tt, {xx, 0.0, 0.0}), b.m); };
        const double lhs = (b.value(t + h, {x, 0.0, 0.0}) - b.value(t - h, {x, 0.0, 0.0})) / (2 * h);
        const double rhs = (p(t, x + h) - 2 * p(t, x) + p(t, x - h)) / (h * h);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-4).scale(1.0));
    }
}
