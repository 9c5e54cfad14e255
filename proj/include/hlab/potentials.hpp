#pragma once

#include "hlab/fields.hpp"
#include "hlab/grid.hpp"

#include <string>
#include <variant>
#include <vector>

namespace hlab {

/// U(x) = a|x|^2/2 + <b, x> + c
struct QuadraticTerm {
    double a = 0.0;
    Point b{0.0, 0.0, 0.0};
    double c = 0.0;
};

/// U(x) = amplitude * exp(-|x - center|^2 / (2 width^2))
struct GaussianBumpTerm {
    double amplitude = 0.0;
    Point center{0.0, 0.0, 0.0};
    double width = 1.0;
};

/// U(x) = amplitude * cos(2 pi sum_i mode_i x_i / period_i + phase). Torus only.
struct TrigTerm {
    double amplitude = 0.0;
    std::array<int, 3> mode{0, 0, 0};
    double phase = 0.0;
    std::array<double, 3> period{1.0, 1.0, 1.0};
};

using PotentialTerm = std::variant<QuadraticTerm, GaussianBumpTerm, TrigTerm>;

/// Closed-form potential: a sum of family terms with analytic derivatives.
/// An empty sum is the zero potential.
class PotentialSpec {
  public:
    PotentialSpec() = default;
    explicit PotentialSpec(int dim) : dim_(dim) { check_dim(); }

    static PotentialSpec zero(int dim) { return PotentialSpec(dim); }
    static PotentialSpec quadratic(int dim, double a, Point b = {0.0, 0.0, 0.0}, double c = 0.0);
    static PotentialSpec gaussian_bump(int dim, double amplitude, Point center, double width);
    static PotentialSpec trig(int dim, double amplitude, std::array<int, 3> mode, double phase,
                              std::array<double, 3> period);

    PotentialSpec &add(const PotentialTerm &term);
    PotentialSpec operator+(const PotentialSpec &other) const;
    PotentialSpec scaled(double s) const;

    int dim() const { return dim_; }
    const std::vector<PotentialTerm> &terms() const { return terms_; }

    bool is_zero() const;
    /// Every term quadratic (or the sum is empty).
    bool is_quadratic() const;
    /// Merged quadratic coefficient a when is_quadratic().
    QuadraticTerm quadratic_part() const;

    /// Throws ConfigError when a term is not admissible on the grid: dimension
    /// mismatch, trig on a box, or a non-constant quadratic/gaussian on a torus.
    void check_admissible(const GridSpec &grid) const;

    double value(const Point &x) const;
    Point gradient(const Point &x) const;
    Sym3 hessian(const Point &x) const;
    double laplacian(const Point &x) const;
    Point grad_laplacian(const Point &x) const;

    /// Delta U as a potential in the same families. Quadratic and trig terms only.
    PotentialSpec laplacian_potential() const;

    ScalarField sample(const GridSpec &grid) const;
    VectorField sample_gradient(const GridSpec &grid) const;
    ScalarField sample_laplacian(const GridSpec &grid) const;
    SymmetricMatrixField sample_hessian(const GridSpec &grid) const;

    std::string describe() const;

  private:
    void check_dim() const;

    int dim_ = 1;
    std::vector<PotentialTerm> terms_;
};

/// V = Delta U1 + |grad U1|^2 / 2 - 2 U2, evaluated pointwise from analytic derivatives.
double schrodinger_value(const PotentialSpec &u1, const PotentialSpec &u2, const Point &x);
Point schrodinger_gradient(const PotentialSpec &u1, const PotentialSpec &u2, const Point &x);

struct SchrodingerFields {
    ScalarField V;
    VectorField gradV;
    ScalarField lapV;
    SymmetricMatrixField hessV;
    bool analytic_second_derivatives = false;
};

/// V and its derivatives on a grid. V and grad V are analytic. The second
/// derivatives are analytic when U1 is quadratic; otherwise W = Delta U1 + |grad U1|^2/2
/// is sampled analytically and differentiated with stencils.
SchrodingerFields schrodinger_potential(const PotentialSpec &u1, const PotentialSpec &u2, const GridSpec &grid);

struct HypothesisAudit {
    double sup_laplacian_V = 0.0;
    double sup_hessian_V = 0.0;  ///< sup of the largest eigenvalue of hess V
    double sup_grad_V = 0.0;
    double inf_V = 0.0;
    double k_min_laplacian = 0.0;  ///< sqrt(max(0, sup Delta V / n))
    double k_min_hessian = 0.0;    ///< sqrt(max(0, sup lambda_max))
    double k = 0.0;
    int n = 1;
    bool laplacian_ok = false;  ///< Delta V <= n k^2
    bool hessian_ok = false;    ///< hess V <= k^2 I
    bool V_nonnegative = false;
};

/// Sups and infs over nodes at least `layers` from box faces.
HypothesisAudit audit_hypotheses(const PotentialSpec &u1, const PotentialSpec &u2, const GridSpec &grid, double k,
                                 int n, int layers = 2);

/// Relative slack used by every audit comparison.
inline constexpr double audit_slack = 1e-9;
bool within_slack(double value, double bound);

/// k3 for the Laplacian-form statement: Delta(-V) >= -n k^2.
inline double k3_from_laplacian_bound(double k, int n) { return -n * k * k; }
/// k3 for the matrix-form statement: hess(-V) >= -k^2 I.
inline double k3_from_hessian_bound(double k) { return -k * k; }

/// Audit for the cost comparison theorems, on F = U2 - |grad U1|^2 / 2.
struct ComparisonAudit {
    double inf_laplacian = 0.0;  ///< admissible k3 for the Laplacian comparison
    double inf_hessian = 0.0;    ///< admissible k3 for the Hessian comparison (inf of smallest eigenvalue)
};
ComparisonAudit audit_comparison(const PotentialSpec &u1, const PotentialSpec &u2, const GridSpec &grid,
                                 int layers = 2);

/// inf Delta U over the interior.
double inf_laplacian(const PotentialSpec &u, const GridSpec &grid, int layers = 2);
/// inf of the smallest eigenvalue of hess U over the interior.
double inf_hessian_eigenvalue(const PotentialSpec &u, const GridSpec &grid, int layers = 2);

}  // namespace hlab
