#pragma once

#include "hlab/grid.hpp"

namespace hlab {

/// sqrt(K) cot(sqrt(K) t), 1/t, or sqrt(-K) coth(sqrt(-K) t) by the sign of K.
/// Solves a' + a^2 + K = 0. Throws std::domain_error for t <= 0 or, when K > 0,
/// t >= pi / sqrt(K).
double a_comparison(double K, double t);

/// sin(sqrt(K) t)/sqrt(K), t, or sinh(sqrt(-K) t)/sqrt(-K). Satisfies b' = a b.
/// Accepts t = 0.
double b_comparison(double K, double t);

/// Positive solution of rho' = Delta rho - k <x, grad rho> in R^n:
/// (2 pi (e^{2tk} - 1) / (k e^{2tk}))^{-n/2} exp(-k|x|^2 / (2(e^{2tk} - 1))).
/// k = 0 gives the heat kernel (4 pi t)^{-n/2} exp(-|x|^2 / 4t).
double gaussian_like_solution(int n, double k, double t, const Point &x);

/// Closed-form log-derivatives of gaussian_like_solution. The Hessian of log rho
/// is hess_log * I.
struct GaussianLikeDerivatives {
    double value = 0.0;
    double log_value = 0.0;
    Point grad_log{0.0, 0.0, 0.0};
    double hess_log = 0.0;
    double lap_log = 0.0;
    double dt_log = 0.0;
};
GaussianLikeDerivatives gaussian_like_derivatives(int n, double k, double t, const Point &x);

/// gaussian_like_solution(n, k, t, x) * exp(-k n t): solves
/// rho' = Delta rho - k <x, grad rho> - k n rho.
double flow_sharp_density(int n, double k, double t, const Point &x);

/// Heat kernel (4 pi t)^{-n/2} exp(-|x - x0|^2 / 4t).
double heat_kernel(int n, double t, const Point &x, const Point &x0);

/// c_{0,t}(0, y) = k|y|^2 coth(kt)/2 - k n t for V = -k n + k^2 |x|^2 / 2.
double quadratic_cost(int n, double k, double t, const Point &y);

/// Minimizing path sinh(ks)/sinh(kt) * y of quadratic_cost, for 0 <= s <= t.
Point quadratic_minimizer(double k, double t, const Point &y, double s);

/// Barenblatt profile of rho' = Delta(rho^m) in R^n:
/// t^{-alpha} (C - kappa |x|^2 t^{-2 beta})_+^{1/(m-1)}, m > 1.
struct BarenblattProfile {
    int n = 1;
    double m = 2.0;
    double C = 1.0;

    double alpha() const;
    double beta() const;
    double kappa() const;
    double value(double t, const Point &x) const;
    /// Radius of the support at time t.
    double support_radius(double t) const;
};

}  // namespace hlab
