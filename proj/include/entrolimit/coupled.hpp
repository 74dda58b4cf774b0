#pragma once

#include "entrolimit/fluid.hpp"
#include "entrolimit/kinetic.hpp"

namespace entrolimit {

struct CoupledOptions {
  double epsilon = 1e-2;
  double cfl = 0.5;
  TransportScheme transport = TransportScheme::FiniteVolume;
  FluidOptions fluid{};
  bool alignment = true;  ///< false drops the alignment substep entirely
};

/// Running time integrals along a coupled run.
struct CoupledBudget {
  double align_int = 0.0;      ///< credited alignment dissipation (1/eps) int D1
  double stress_int = 0.0;     ///< int D1 dt under the exact alignment flow
  double drag_diss_int = 0.0;  ///< int int |u - xi|^2 f dt
  double slip_int = 0.0;       ///< int rho_f |u_f - u|^2 dt
  double visc_int = 0.0;       ///< int |grad_h u|^2 dt from the viscous solves
  Eigen::VectorXd electric_impulse;  ///< -int rho_f grad Phi dt
  RemapStats remap;
};

/// Strang-split stepper for the kinetic-fluid system. One step of size dt is
///   fluid dt/2, transport dt/2, field + drag dt/2, alignment dt,
///   drag dt/2, transport dt/2, fluid dt/2.
/// The drag substeps solve the particle and fluid exchange together, so the
/// two phases only trade momentum with the electric field.
class CoupledStepper {
 public:
  CoupledStepper(DistF f, FluidState fluid, CoupledOptions opts);

  /// Largest dt admitted by the transport and fluid stability limits.
  double stable_dt() const;

  void step(double dt);

  double time() const { return t_; }
  const DistF& f() const { return f_; }
  const FluidState& fluid() const { return fluid_; }
  const CoupledBudget& budget() const { return budget_; }
  const CoupledOptions& options() const { return opts_; }

 private:
  void drag_exchange(double tau, const VectorField& grad_phi);
  void align(double dt);

  DistF f_;
  FluidState fluid_;
  CoupledOptions opts_;
  CoupledBudget budget_;
  double t_ = 0.0;
};

}  // namespace entrolimit
