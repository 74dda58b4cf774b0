#pragma once

#include "entrolimit/kinetic.hpp"

namespace entrolimit {

/// Isentropic compressible fluid in conservative variables.
struct FluidState {
  Field rho;       ///< mass density, > 0
  VectorField m;   ///< momentum rho u, dim x ncells
  double gamma = 2.0;

  VectorField velocity() const;
};

/// p(rho) = rho^gamma. Throws std::domain_error for rho < 0.
double pressure(double rho, double gamma);

/// Sound speed sqrt(gamma rho^(gamma-1)).
double sound_speed(double rho, double gamma);

enum class ViscousScheme { Implicit, Explicit };

struct FluidOptions {
  double cfl = 1.0;  ///< hard limit on dt (max|u| + c) / hx
  ViscousScheme viscous = ViscousScheme::Implicit;
};

/// Diagnostics from one fluid update.
struct FluidStepStats {
  /// dt * int |grad_h u|^2 credited by the viscous update.
  double viscous_dissipation = 0.0;
};

/// Largest dt with dt (max|u| + c) / hx <= cfl.
double fluid_stable_dt(const FluidState& state, const PhaseGrid& grid, double cfl);

/// Convection, pressure and Laplacian viscosity over dt, without particle drag.
/// Rusanov fluxes on minmod-reconstructed states with a two-stage SSP
/// Runge-Kutta update, then the viscous term (backward Euler by default).
FluidState fluid_convective_step(const FluidState& state, double dt, const PhaseGrid& grid,
                                 const FluidOptions& opts = {}, FluidStepStats* stats = nullptr);

/// Full fluid update with the Brinkman exchange rho_f (u_f - u) integrated
/// exactly per cell for frozen particle moments.
FluidState fluid_step(const FluidState& state, const Moments& mom, double dt,
                      const PhaseGrid& grid, const FluidOptions& opts = {},
                      FluidStepStats* stats = nullptr);

/// Total momentum of fluid plus particles, sum_x (m + j_f) hx^d.
Eigen::VectorXd coupled_momentum_budget(const FluidState& state, const DistF& f);

/// Forward-difference gradient energy sum_k sum_x |D_k^+ v|^2 hx^d summed over
/// the rows of v. This is the stencil paired with the viscous Laplacian.
double gradient_energy(const VectorField& v, const PhaseGrid& grid);

/// Second-order centred Laplacian D^- D^+ per axis, applied to each row.
VectorField discrete_laplacian(const VectorField& v, const PhaseGrid& grid);

}  // namespace entrolimit
