#pragma once

#include "hlab/fields.hpp"
#include "hlab/potentials.hpp"

#include <string>
#include <vector>

namespace hlab {

enum class Scheme { explicit_euler, imex };
std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string &name);

struct SolverConfig {
    Scheme scheme = Scheme::explicit_euler;
    double dt = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    double floor = 1e-30;
    /// Requested output times in (t_start, t_end]. t_end is always included.
    std::vector<double> snapshot_times;
};

enum class Equation { linear, porous_medium };
std::string to_string(Equation equation);

struct Snapshot {
    double time = 0.0;
    ScalarField field;
};

/// Solution snapshots. The first snapshot is the initial datum at t_start.
/// For porous-medium runs u1 holds U and u2 is zero.
struct Trajectory {
    Equation equation = Equation::linear;
    PotentialSpec u1;
    PotentialSpec u2;
    double m = 1.0;
    double dt = 0.0;
    double t_start = 0.0;
    std::size_t steps = 0;
    std::size_t floor_activations = 0;
    std::vector<Snapshot> snapshots;

    bool has(double t) const;
    /// Throws std::out_of_range when no snapshot lands on t.
    const ScalarField &at(double t) const;
    const GridSpec &grid() const { return snapshots.front().field.grid(); }
};

/// Largest explicit step: 0.25 / sum_a h_a^{-2}.
double explicit_dt_limit(const GridSpec &grid);

/// Delta rho + <drift, grad rho> + reaction * rho with homogeneous Neumann
/// faces on box grids (ghost reflection). `out` is resized to the node count.
void linear_rhs(const ScalarField &rho, const VectorField &drift, const ScalarField &reaction,
                std::vector<double> &out);

/// Steady residual Delta rho + <grad U1, grad rho> + U2 rho.
ScalarField linear_operator(const ScalarField &rho, const PotentialSpec &u1, const PotentialSpec &u2);

/// rho' = Delta rho + <grad U1, grad rho> + U2 rho.
Trajectory solve_linear(const ScalarField &rho0, const PotentialSpec &u1, const PotentialSpec &u2,
                        const SolverConfig &cfg);

/// rho' = Delta(rho^m) + U rho^{2-m}, explicit with a step re-limited every step.
/// Requires m - 1 + 2/n > 0 and rho0 >= cfg.floor.
Trajectory solve_porous_medium(const ScalarField &rho0, double m, const PotentialSpec &U, const SolverConfig &cfg);

/// Approximates p_t(x0, .) by evolving the heat kernel at time sigma0^2 from
/// sigma0^2 to t. sigma0 <= 0 selects 4 * max spacing. Bias is O(sigma0^2).
/// cfg supplies the scheme, dt and floor; its times are ignored.
ScalarField fundamental_solution_approx(const Point &x0, double t, const PotentialSpec &u1, const PotentialSpec &u2,
                                        const GridSpec &grid, const SolverConfig &cfg, double sigma0 = 0.0);

/// Minimal-image displacement x - x0 on periodic grids, plain difference on boxes.
Point displacement(const GridSpec &grid, const Point &x, const Point &x0);

}  // namespace hlab
