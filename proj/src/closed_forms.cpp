#include "hlab/closed_forms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hlab {

namespace {

constexpr double taylor_switch = 1e-6;

void check_time(double K, double t, bool allow_zero) {
    if (!std::isfinite(t) || !std::isfinite(K)) {
        throw std::domain_error("comparison function arguments must be finite");
    }
    if (allow_zero ? t < 0.0 : t <= 0.0) {
        throw std::domain_error("comparison function requires t > 0");
    }
    if (K > 0.0 && t >= std::numbers::pi / std::sqrt(K)) {
        throw std::domain_error("comparison function requires t < pi / sqrt(K) for K > 0");
    }
}

}  // namespace

double a_comparison(double K, double t) {
    check_time(K, t, false);
    const double u = K * t * t;
    if (std::abs(u) < taylor_switch) {
        return (1.0 - u / 3.0 - u * u / 45.0 - 2.0 * u * u * u / 945.0) / t;
    }
    if (K > 0.0) {
        const double r = std::sqrt(K);
        return r / std::tan(r * t);
    }
    const double r = std::sqrt(-K);
    return r / std::tanh(r * t);
}

double b_comparison(double K, double t) {
    check_time(K, t, true);
    const double u = K * t * t;
    if (std::abs(u) < taylor_switch) {
        return t * (1.0 - u / 6.0 + u * u / 120.0 - u * u * u / 5040.0);
    }
    if (K > 0.0) {
        const double r = std::sqrt(K);
        return std::sin(r * t) / r;
    }
    const double r = std::sqrt(-K);
    return std::sinh(r * t) / r;
}

GaussianLikeDerivatives gaussian_like_derivatives(int n, double k, double t, const Point &x) {
    if (n < 1 || !(k >= 0.0) || !(t > 0.0)) {
        throw std::domain_error("gaussian_like_solution requires n >= 1, k >= 0, t > 0");
    }
    GaussianLikeDerivatives d;
    const double r2 = norm2(x);
    double s = 0.0;      // (e^{2tk} - 1) / (k e^{2tk}); 2t at k = 0
    double alpha = 0.0;  // log rho = -(n/2) log(2 pi s) - alpha |x|^2
    if (k == 0.0) {
        s = 2.0 * t;
        alpha = 1.0 / (4.0 * t);
        d.dt_log = -0.5 * n / t + r2 / (4.0 * t * t);
    } else {
        const double e = std::expm1(2.0 * t * k);
        s = -std::expm1(-2.0 * t * k) / k;
        alpha = k / (2.0 * e);
        // e^{2tk} / e^2 written to avoid overflow for large tk
        const double ratio = (1.0 / e) * (1.0 + 1.0 / e);
        d.dt_log = -n * k / e + r2 * k * k * ratio;
    }
    d.log_value = -0.5 * n * std::log(2.0 * std::numbers::pi * s) - alpha * r2;
    d.value = std::exp(d.log_value);
    d.grad_log = (-2.0 * alpha) * x;
    d.hess_log = -2.0 * alpha;
    d.lap_log = -2.0 * alpha * n;
    return d;
}

double gaussian_like_solution(int n, double k, double t, const Point &x) {
    return gaussian_like_derivatives(n, k, t, x).value;
}

double flow_sharp_density(int n, double k, double t, const Point &x) {
    return std::exp(gaussian_like_derivatives(n, k, t, x).log_value - k * n * t);
}

double heat_kernel(int n, double t, const Point &x, const Point &x0) {
    if (n < 1 || !(t > 0.0)) {
        throw std::domain_error("heat_kernel requires n >= 1, t > 0");
    }
    return std::pow(4.0 * std::numbers::pi * t, -0.5 * n) * std::exp(-norm2(x - x0) / (4.0 * t));
}

double quadratic_cost(int n, double k, double t, const Point &y) {
    if (!(k > 0.0) || !(t > 0.0)) {
        throw std::domain_error("quadratic_cost requires k > 0, t > 0");
    }
    return 0.5 * k * norm2(y) / std::tanh(k * t) - k * n * t;
}

Point quadratic_minimizer(double k, double t, const Point &y, double s) {
    if (!(k > 0.0) || !(t > 0.0) || s < 0.0 || s > t) {
        throw std::domain_error("quadratic_minimizer requires k > 0, t > 0, 0 <= s <= t");
    }
    if (s == t) {
        return y;
    }
    return (std::sinh(k * s) / std::sinh(k * t)) * y;
}

double BarenblattProfile::alpha() const { return n / (n * (m - 1.0) + 2.0); }
double BarenblattProfile::beta() const { return alpha() / n; }
double BarenblattProfile::kappa() const { return alpha() * (m - 1.0) / (2.0 * m * n); }

double BarenblattProfile::value(double t, const Point &x) const {
    if (!(m > 1.0) || !(t > 0.0)) {
        throw std::domain_error("Barenblatt profile requires m > 1 and t > 0");
    }
    const double inner = C - kappa() * norm2(x) * std::pow(t, -2.0 * beta());
    if (inner <= 0.0) {
        return 0.0;
    }
    return std::pow(t, -alpha()) * std::pow(inner, 1.0 / (m - 1.0));
}

double BarenblattProfile::support_radius(double t) const {
    return std::sqrt(C / kappa()) * std::pow(t, beta());
}

}  // namespace hlab
