#pragma once

#include <vector>

#include "entrolimit/grid.hpp"

namespace entrolimit {

/// State of the two-phase limit system: pressureless particles (rho_f, omega)
/// and the compressible fluid (rho, m).
struct LimitState {
  Field rho_f;
  VectorField omega;  ///< rho_f u_f
  Field rho;
  VectorField m;      ///< rho u

  /// u_f = omega / rho_f, zero on vacuum cells.
  VectorField u_f() const;
  VectorField u() const;

  LimitState& operator+=(const LimitState& o);
  LimitState& operator*=(double s);
};

LimitState operator+(LimitState a, const LimitState& b);
LimitState operator*(double s, LimitState a);

struct LimitOptions {
  double gamma = 2.0;
  double hyperviscosity = 0.0;  ///< coefficient of an extra Laplacian on every component
};

/// Semi-discrete right-hand side with centred differences. The particle field
/// comes from solve_poisson and the drag terms are evaluated once and shared
/// between the two momentum equations.
LimitState limit_rhs(const LimitState& U, const PhaseGrid& grid, const LimitOptions& opts = {});

/// Electric force density -rho_f grad Phi of a state.
VectorField limit_field_force(const LimitState& U, const PhaseGrid& grid);

/// Classical RK4 step. Throws SmoothnessLost when max|grad u_f| dt > 1 and
/// StateError when the fluid density stops being positive.
LimitState limit_step(const LimitState& U, double dt, const PhaseGrid& grid,
                      const LimitOptions& opts = {});

/// Step bound from advection, the explicit viscous term and the drag rate.
double limit_stable_dt(const LimitState& U, const PhaseGrid& grid, const LimitOptions& opts,
                       double cfl);

/// Integrates from t = 0 and returns the state at every requested time
/// (non-decreasing). Each interval uses equal steps below the stable bound.
std::vector<LimitState> integrate_limit(const LimitState& U0, const PhaseGrid& grid,
                                        const LimitOptions& opts, const std::vector<double>& times,
                                        double cfl = 0.5);

/// Averages a state on grid.refined(factor) back onto the coarse cells.
LimitState restrict_state(const LimitState& fine, const PhaseGrid& fine_grid, int factor);

/// Averages a cell field from grid.refined(factor) onto the coarse cells.
Field restrict_field(const Field& fine, const PhaseGrid& fine_grid, int factor);

/// Sum over cells of each row times hx^d.
Eigen::VectorXd total(const VectorField& v, const PhaseGrid& grid);

}  // namespace entrolimit
