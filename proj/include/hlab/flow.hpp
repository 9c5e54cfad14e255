#pragma once

#include "hlab/fields.hpp"
#include "hlab/pde.hpp"
#include "hlab/potentials.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hlab {

/// Closed counter-clockwise polyline in R^2 (third coordinate unused).
/// Curvature kappa > 0 on convex curves; nu is the outward unit normal and the
/// mean curvature vector is -kappa nu.
class CurveState {
  public:
    static constexpr int min_nodes = 64;

    CurveState() = default;
    /// Validates node count and orientation (reverses clockwise input).
    explicit CurveState(std::vector<Point> nodes);

    static CurveState circle(const Point &center, double radius, int nodes);
    static CurveState ellipse(const Point &center, double a, double b, int nodes);

    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<Point> &nodes() const { return nodes_; }
    const Point &node(int i) const { return nodes_[i]; }
    const Point &tangent(int i) const { return tangent_[i]; }
    const Point &normal(int i) const { return normal_[i]; }
    double curvature(int i) const { return curvature_[i]; }
    /// Length of the element from node i to node i+1.
    double element_length(int i) const { return element_[i]; }
    /// Arclength weight of node i: half of each adjacent element.
    double node_weight(int i) const;

    double length() const;
    double area() const;
    double min_element() const;
    double max_element() const;

  private:
    void update();

    std::vector<Point> nodes_;
    std::vector<Point> tangent_;
    std::vector<Point> normal_;
    std::vector<double> curvature_;
    std::vector<double> element_;
};

/// Largest admissible step: 0.2 * (min element length)^2.
double flow_dt_limit(const CurveState &curve);

/// One forward-Euler step of x' = -kappa nu + <grad U, nu> nu. Throws ConfigError
/// when dt exceeds flow_dt_limit.
CurveState flow_step(const CurveState &curve, const PotentialSpec &U, double dt);

/// Resample at uniform arclength of a periodic cubic spline through the nodes
/// (parameterized by chord length). Node 0 stays fixed.
CurveState redistribute(const CurveState &curve);

bool self_intersecting(const CurveState &curve);

/// Integral of e^{-U} over the polyline (node weights).
double weighted_length(const CurveState &curve, const PotentialSpec &U);

struct FlowOptions {
    double dt_max = 1e-3;
    double cfl = 0.2;
    int redistribute_every = 10;
    int intersection_check_every = 10;
};

struct FlowSample {
    double t = 0.0;
    CurveState curve;
    std::size_t steps = 0;
};

/// Runs the flow from t0, landing exactly on each sample time. Throws
/// NumericalError on self-intersection or when the length drops below ten
/// initial element lengths.
std::vector<FlowSample> evolve_flow(const CurveState &initial, const PotentialSpec &U, double t0,
                                    const std::vector<double> &sample_times, const FlowOptions &opts = {});

/// Positive ambient density with gradient.
struct AmbientDensity {
    std::function<double(const Point &)> value;
    std::function<Point(const Point &)> gradient;

    /// Bilinear interpolation of the field and of its stencil gradient. Points
    /// closer than `layers` nodes to a box face throw std::domain_error.
    static AmbientDensity from_field(const ScalarField &rho, int layers = 2);
};

enum class HuiskenVariant { sinh, b, weighted };
std::string to_string(HuiskenVariant variant);
HuiskenVariant huisken_variant_from_string(const std::string &name);

struct HuiskenParams {
    HuiskenVariant variant = HuiskenVariant::weighted;
    double k = 0.0;   ///< sinh and weighted variants
    double k3 = 0.0;  ///< b variant
    double K = 0.0;   ///< weighted variant: hess U >= K I
    int n = 2;
    int m = 1;
    double T = 1.0;
};

/// Time factor of the monotone quantity at tau = T - t. The sinh variant uses
/// (sinh(k tau)/k)^{(n-m)/2}, which is a constant multiple of sinh^{(n-m)/2} and
/// tends to tau^{(n-m)/2} as k -> 0.
double huisken_prefactor(const HuiskenParams &p, double tau);

/// Integral of rho over the polyline (node weights).
double curve_integral(const CurveState &curve, const AmbientDensity &rho);

/// prefactor(T - t) * integral of rho_{T-t} over the curve.
double huisken_quantity(const CurveState &curve, const AmbientDensity &rho_T_minus_t, const HuiskenParams &p,
                        double t);

struct Dissipation {
    double normal_hessian = 0.0;  ///< integral of rho <hess U nu, nu> / 2
    double deviation = 0.0;       ///< integral of rho |d_nu log rho + kappa|^2
    double total() const { return normal_hessian + deviation; }
};

Dissipation dissipation_integrand(const CurveState &curve, const AmbientDensity &rho, const PotentialSpec &U);

struct HuiskenSeries {
    std::vector<double> t;
    std::vector<double> Q;
    std::vector<double> dissipation;  ///< prefactor * (the right-hand side integral of the variant)
    std::vector<double> slope;        ///< (Q_{j+1} - Q_j) / (dt Q_0), one fewer entry
    std::vector<double> balance;      ///< slope + mean dissipation / Q_0, one fewer entry
    std::vector<double> weighted_length;
    double max_slope = 0.0;
    double max_relative_drift = 0.0;  ///< max |Q_j / Q_0 - 1|
    double max_abs_balance = 0.0;
};

/// Evaluates Q along flow samples; rho_at(tau) returns the ambient density at tau.
/// The weighted variant's right-hand side drops the normal-Hessian term, as in
/// its statement; the other variants keep it.
HuiskenSeries huisken_series(const std::vector<FlowSample> &samples,
                             const std::function<AmbientDensity(double)> &rho_at, const PotentialSpec &U,
                             const HuiskenParams &p);

struct VolumeAudit {
    std::vector<double> t;
    std::vector<double> volume;
    std::vector<double> normalized;  ///< volume / b_{k3/n}(t)^n
    double max_relative_increase = 0.0;
    double max_relative_drift = 0.0;
    bool nonincreasing = false;
};

/// Advects seeds by X = grad h, h = -2 log rho - U1, between the trajectory's
/// snapshots in [t0, t1] (Heun), accumulating log det by the trapezoid rule on
/// Delta h. Each seed carries `seed_volume`. Throws std::domain_error when a
/// particle leaves the core of a box grid.
VolumeAudit volume_audit(const Trajectory &traj, const std::vector<Point> &seeds, double seed_volume, double t0,
                         double t1, double k3, double tolerance = 1e-3, int layers = 2);

}  // namespace hlab
