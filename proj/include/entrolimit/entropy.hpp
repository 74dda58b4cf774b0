#pragma once

#include <limits>
#include <vector>

#include "entrolimit/fluid.hpp"
#include "entrolimit/kinetic.hpp"
#include "entrolimit/limit.hpp"

namespace entrolimit {

inline constexpr double kNotAccumulated = std::numeric_limits<double>::quiet_NaN();

/// Diagnostics of one reported state. The first twelve fields form the fixed
/// CSV columns; the time integrals after them are NaN when not accumulated.
struct EntropyReport {
  double t = 0.0;
  double F = 0.0;
  double D1 = 0.0;
  double D2 = 0.0;
  double H_rel = 0.0;
  double P_rel = 0.0;
  double coulomb_rel = 0.0;
  double drag_rel = 0.0;
  double visc_rel = 0.0;
  double stress_l1 = 0.0;
  double mass_drift = 0.0;
  double momentum_drift = 0.0;

  double align_int = kNotAccumulated;      ///< credited (1/eps) int D1
  double stress_int = kNotAccumulated;     ///< int_0^t int |xi - u_f|^2 f
  double drag_diss_int = kNotAccumulated;  ///< int_0^t int |u - xi|^2 f
  double slip_int = kNotAccumulated;       ///< int_0^t int rho_f |u_f - u|^2
  double visc_int = kNotAccumulated;       ///< int_0^t int |grad u|^2
  double drag_rel_int = kNotAccumulated;
  double visc_rel_int = kNotAccumulated;

  /// H_rel + coulomb_rel + drag_rel_int + visc_rel_int.
  double bound_lhs() const;
};

/// Kinetic, internal, field and particle kinetic energy.
double energy_functional(const DistF& f, const FluidState& state);

/// int int |u_f - xi|^2 f.
double dissipation_D1(const DistF& f);

/// int int |u - xi|^2 f + int |grad_h u|^2 with forward differences.
double dissipation_D2(const DistF& f, const VectorField& u);

/// P(x|y) = (x^g - y^g)/(g-1) + g (y - x) y^(g-1)/(g-1). Throws std::domain_error
/// for y <= 0 or x < 0.
double relative_pressure(double rho_bar, double rho, double gamma);

/// Fills H_rel, P_rel, coulomb_rel, drag_rel and visc_rel.
EntropyReport relative_entropy(const Moments& mom, const FluidState& fluid, const LimitState& U,
                               const PhaseGrid& grid);

struct EnergyCheck {
  bool pass = false;        ///< both forms hold
  bool dissipation_form = false;     ///< F(t) + int [D2 + D1/eps] <= F(0)(1 + tol)
  bool slip_form = false;     ///< variant holds with the fitted constant
  double margin = 0.0;      ///< min_t F(0)(1 + tol) - lhs(t)
  double violation = 0.0;   ///< max_t lhs(t) - F(0)
  double worst_t = 0.0;
  double C_fit = 0.0;       ///< max_t (lhs_slip(t) - F(0))^+ / eps
  double slip_excess = 0.0;
  bool used_accumulators = false;
};

/// Discrete energy inequality checks on a trajectory ordered in time. Uses the
/// accumulated integrals when every report carries them, the trapezoid rule on
/// the report times otherwise.
EnergyCheck check_energy_inequality(const std::vector<EntropyReport>& traj, double epsilon,
                                    double tol_growth = 1e-3);

struct PoincareBound {
  double rhs = 0.0;    ///< Cbar (int rho |u|^2 + ||grad u||^2)
  double norm2 = 0.0;  ///< ||u||^2
  double ratio = 0.0;  ///< norm2 / rhs, 0 when both vanish
};

/// Throws std::invalid_argument when rho is negative somewhere or int rho < c1.
PoincareBound poincare_norm(const VectorField& u, const Field& rho, const PhaseGrid& grid,
                            double cbar = 10.0, double c1 = 1e-8);

}  // namespace entrolimit
