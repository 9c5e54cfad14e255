#pragma once

#include "hlab/fields.hpp"
#include "hlab/potentials.hpp"
#include "hlab/report.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace hlab {

enum class CostVariant {
    kinetic_plus_potential,  ///< L = |v|^2/2 + V, V = Delta U1 + |grad U1|^2/2 - 2 U2
    drift_form,              ///< L = |v - grad U1(x)|^2/2 - U2(x)
};
std::string to_string(CostVariant variant);

struct CostFunctional {
    CostVariant variant = CostVariant::kinetic_plus_potential;
    PotentialSpec u1;
    PotentialSpec u2;
    /// When set, endpoints are points of this torus: costs minimize over images.
    std::optional<GridSpec> torus;

    static CostFunctional kinetic(const PotentialSpec &u1, const PotentialSpec &u2);
    static CostFunctional drift(const PotentialSpec &u1, const PotentialSpec &u2);

    int dim() const { return u1.dim(); }
    /// Potential part of the Lagrangian is a quadratic polynomial in x.
    bool quadratic() const { return u1.is_quadratic() && u2.is_quadratic(); }
};

/// Path with P nodes at uniform times in [s, t]; the endpoints are pinned.
struct PathCurve {
    double s = 0.0;
    double t = 1.0;
    std::vector<Point> x;

    static PathCurve straight(const Point &a, const Point &b, double s, double t, int nodes);
    int size() const { return static_cast<int>(x.size()); }
    double tau() const { return (t - s) / (size() - 1); }
    double time(int i) const { return s + i * tau(); }
};

struct CostOptions {
    int nodes = 256;
    double tolerance = 1e-8;  ///< gradient max-norm
    int max_iterations = 10000;
    int restarts = 3;  ///< perturbed starts, used only when the functional is not quadratic
    unsigned seed = 12345;
};

struct CostResult {
    double value = 0.0;
    PathCurve path;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Max-norm of the discrete Euler-Lagrange residual (gradient / tau).
    double euler_lagrange_residual = 0.0;
    /// Number of distinct local minima found with (near) the least value.
    int multiplicity = 1;
};

/// Composite trapezoid action with segment velocities and averaged endpoint potentials.
double action_value(const PathCurve &path, const CostFunctional &fn);
/// Gradient of action_value with respect to the interior nodes (endpoints zero).
std::vector<Point> action_gradient(const PathCurve &path, const CostFunctional &fn);

/// Minimizes the discrete action from x at time s to y at time t. `warm` replaces
/// the straight-line start when given (endpoints are reset to x and y).
CostResult minimize_cost(const Point &x, const Point &y, double s, double t, const CostFunctional &fn,
                         const CostOptions &opts = {}, const PathCurve *warm = nullptr);

struct CostField {
    ScalarField value;
    VectorField terminal_velocity;  ///< path velocity at time t (last segment)
    std::vector<char> flagged;      ///< non-converged, multiple minima, or inactive
    CostFunctional fn;
    Point x0{0.0, 0.0, 0.0};
    double t = 1.0;
    std::size_t nonconverged = 0;
    std::size_t multiple = 0;
};

/// c_{0,t}(x0, .) at every node. Rows along axis 0 run in parallel; each row is
/// swept in order with warm starts from the previous node. Nodes with
/// active[i] == 0 are skipped and flagged.
CostField cost_field(const Point &x0, double t, const CostFunctional &fn, const GridSpec &grid,
                     const CostOptions &opts = {}, const std::vector<char> *active = nullptr);

/// f' + |grad f|^2/2 + <grad U1, grad f> + U2 at the middle time level, with a
/// three-point (non-uniform) time difference. Needs at least 3 levels.
ScalarField hj_residual(const std::vector<std::pair<double, ScalarField>> &costs, const PotentialSpec &u1,
                        const PotentialSpec &u2);

struct ComparisonOptions {
    double tolerance = 5e-3;
    int boundary_layers = 2;
};

/// Delta_x c <= sqrt(-k3 n) coth(sqrt(-k3/n) t) = n a_{k3/n}(t).
/// Audits Delta(U2 - |grad U1|^2/2) >= k3; throws HypothesisError otherwise.
EstimateReport check_laplacian_comparison(const CostField &cost, double k3, int n, double t,
                                          const ComparisonOptions &opts = {});
/// hess_x c <= sqrt(-k3) coth(sqrt(-k3) t) I = a_{k3}(t) I, via the largest eigenvalue.
EstimateReport check_hessian_comparison(const CostField &cost, double k3, double t,
                                        const ComparisonOptions &opts = {});

}  // namespace hlab
