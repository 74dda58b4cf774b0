#pragma once

#include "entrolimit/grid.hpp"

namespace entrolimit {

/// Particle distribution f(x, xi) >= 0 on a PhaseGrid. Stored nvel x ncells,
/// so each column is the velocity distribution of one spatial cell.
struct DistF {
  PhaseGrid grid;
  Eigen::MatrixXd data;

  /// Sum_x hx^d * velocity_integral(f(x, .)).
  double mass() const;
};

DistF zero_distribution(const PhaseGrid& grid);

/// Velocity moments of a distribution, per spatial cell.
struct Moments {
  Field rho_f;                  ///< number density
  VectorField j_f;              ///< momentum density rho_f u_f
  VectorField u_f;              ///< mean velocity, zero on vacuum cells
  Eigen::ArrayXXd S;            ///< dim*dim x ncells, second moment int xi (x) xi f
  Eigen::Array<bool, Eigen::Dynamic, 1> vacuum;
};

/// A cell is vacuum when rho_f < kVacuumFraction * mean(rho_f).
inline constexpr double kVacuumFraction = 1e-12;

Moments moments(const DistF& f);

/// Bookkeeping collected by the velocity remaps and the transport sweeps.
struct RemapStats {
  double clipped_mass = 0.0;  ///< mass removed by clipping negative values
  double escaped_mass = 0.0;  ///< mass whose image left the velocity box
  Index limited_cells = 0;    ///< cells where the positivity blend was active
  Index warnings = 0;         ///< cells whose escaped mass exceeded tolerance

  RemapStats& operator+=(const RemapStats& o);
};

enum class TransportScheme { FiniteVolume, SemiLagrangian };

/// Free streaming d_t f + xi . grad_x f = 0 over dt on the periodic box.
/// The finite-volume variant is second order with a minmod limiter and
/// requires dt * max|xi| / hx <= 1 (throws CflViolation otherwise).
/// The semi-Lagrangian variant uses cubic interpolation and has no CFL limit.
DistF transport_substep(const DistF& f, double dt,
                        TransportScheme scheme = TransportScheme::FiniteVolume,
                        RemapStats* stats = nullptr);

/// Pushes every non-skipped cell through the affine velocity map
/// xi -> a * xi + shift(:, cell). The remap deposits each node's mass with
/// quadratic weights (mass, mean and second moment transported exactly) and
/// blends toward linear weights only as far as positivity requires.
DistF affine_velocity_map(const DistF& f, double a, const VectorField& shift,
                          const Eigen::Array<bool, Eigen::Dynamic, 1>& skip,
                          RemapStats* stats = nullptr);

/// Exact flow of d_t f = -div_xi((g - xi) f) over dt with g = u - grad Phi
/// frozen per cell. Vacuum cells pass through unchanged.
DistF drag_field_substep(const DistF& f, const VectorField& u, const VectorField& grad_phi,
                         double dt, RemapStats* stats = nullptr);

/// Exact flow of the local alignment d_t f = -(1/eps) div_xi((u_f - xi) f)
/// over dt, contracting each cell toward its own mean velocity.
DistF alignment_substep(const DistF& f, double dt, double epsilon, RemapStats* stats = nullptr);

/// Per-cell int (xi - u_f) (x) (xi - u_f) f dxi, dim*dim x ncells. Zero on vacuum cells.
Eigen::ArrayXXd kinetic_stress(const DistF& f);

/// Per-cell int |xi - c(x)|^2 f dxi for an arbitrary per-cell centre c.
Field centred_second_moment(const DistF& f, const VectorField& centre);

}  // namespace entrolimit
