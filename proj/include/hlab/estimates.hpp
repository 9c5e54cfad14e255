#pragma once

#include "hlab/action.hpp"
#include "hlab/fields.hpp"
#include "hlab/pde.hpp"
#include "hlab/potentials.hpp"
#include "hlab/report.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace hlab {

struct CheckOptions {
    double tolerance = 5e-3;
    int boundary_layers = 2;
    /// Verdicts need t - t_start >= early_time_factor * dt.
    double early_time_factor = 10.0;
    /// Skip the hypothesis audit (used by the analytic checks on supplied potentials).
    bool audit = true;
};

/// log-derivatives of a density known in closed form.
struct AnalyticDensity {
    std::function<double(const Point &)> log_value;
    std::function<double(const Point &)> lap_log;
    std::function<Sym3(const Point &)> hess_log;
};

/// The gaussian-like solution with U1 = -k|x|^2/2 (k = 0: heat kernel).
AnalyticDensity gaussian_like_density(int n, double k, double t);

/// Generalized Li-Yau: Delta log rho + Delta U1/2 >= -(nk/2) coth(kt) = -(n/2) a_{-k^2}(t).
/// margin = observed - bound. Audits Delta V <= n k^2 (HypothesisError).
EstimateReport check_li_yau(const Trajectory &traj, double k, double t, const CheckOptions &opts = {});
/// Same inequality with closed-form derivatives sampled at the grid nodes.
EstimateReport check_li_yau(const AnalyticDensity &rho, const PotentialSpec &u1, const PotentialSpec &u2,
                            const GridSpec &grid, double k, double t, const CheckOptions &opts = {});

/// Matrix form: lambda_min(hess log rho + hess U1/2) >= -(k/2) coth(kt). Audits hess V <= k^2 I.
EstimateReport check_matrix_li_yau(const Trajectory &traj, double k, double t, const CheckOptions &opts = {});
EstimateReport check_matrix_li_yau(const AnalyticDensity &rho, const PotentialSpec &u1, const PotentialSpec &u2,
                                   const GridSpec &grid, double k, double t, const CheckOptions &opts = {});

/// Right-hand side of the generalized Harnack inequality in log form:
/// -(n/2) log(b(t)/b(s)) - (c + U1(y) - U1(x))/2 with b = b_{-k^2}.
double harnack_log_bound(int n, double k, double s, double t, double cost, double u1_x, double u1_y);

/// log rho_t(y) - log rho_s(x) against harnack_log_bound, one entry per pair
/// (reported at y). Costs use the kinetic-plus-potential functional. Throws
/// NumericalError when a cost minimization does not converge.
EstimateReport check_harnack(const Trajectory &traj, double k, double s, double t,
                             const std::vector<std::pair<Point, Point>> &pairs, const CheckOptions &opts = {},
                             const CostOptions &cost_opts = {});
/// Same with a closed-form density rho(tau, x).
EstimateReport check_harnack(const std::function<double(double, const Point &)> &log_rho, const PotentialSpec &u1,
                             const PotentialSpec &u2, int n, double k, double s, double t,
                             const std::vector<std::pair<Point, Point>> &pairs, const CheckOptions &opts = {},
                             const CostOptions &cost_opts = {});

/// (n/2) log(1 / (4 pi b(t))) - (c + U1(y) - U1(x0))/2 with b = b_{-k^2}.
double cheeger_yau_log_bound(int n, double k, double t, double cost, double u1_x0, double u1_y);

struct CheegerYauOptions {
    CheckOptions check;
    /// Nodes with p < core_fraction * max p are excluded.
    double core_fraction = 1e-6;
    CostOptions cost;
};

/// log p_t(x0, y) against cheeger_yau_log_bound over the core region.
EstimateReport check_cheeger_yau(const ScalarField &kernel, const Point &x0, const PotentialSpec &u1,
                                 const PotentialSpec &u2, double k, double t, const CheegerYauOptions &opts = {});

struct AronsonBenilanOptions {
    CheckOptions check;
    /// Nodes with rho < support_factor * floor are outside the support.
    double support_factor = 1e3;
    /// Support exclusion is dilated by this many nodes.
    int support_band = 10;
    double floor = 1e-30;
};

/// (2n/(2+n(m-1))) a_{k3(2+n(m-1))/(2n)}(t) as the bound for (2m/(1-m)) Delta rho^{m-1}.
double aronson_benilan_bound(int n, double m, double k3, double t);

/// margin = bound - (2m/(1-m)) Delta(rho^{m-1}). Audits Delta U >= k3/(2m).
EstimateReport check_aronson_benilan(const Trajectory &traj, double k3, double t,
                                     const AronsonBenilanOptions &opts = {});

struct LiouvilleOptions {
    CheckOptions check;
    /// Max |rho'| / max rho allowed for an approximate steady state.
    double steady_tolerance = 1e-6;
};

/// margin = V/2 - |grad log rho + grad U1/2|^2. HypothesisError if V < 0 somewhere;
/// NumericalError if rho is not steady. When V == 0 the extras carry sup, inf and
/// sup/inf - 1 of rho e^{U1/2}.
EstimateReport check_liouville(const ScalarField &rho, const PotentialSpec &u1, const PotentialSpec &u2,
                               const LiouvilleOptions &opts = {});

}  // namespace hlab
