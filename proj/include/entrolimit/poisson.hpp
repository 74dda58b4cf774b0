#pragma once

#include "entrolimit/grid.hpp"

namespace entrolimit {

/// Zero-mean periodic potential and its gradient.
struct Potential {
  Field phi;
  VectorField grad_phi;  ///< dim x ncells
  double removed_mean = 0.0;  ///< mean of the source that was projected out
};

/// Solves -Laplace(phi) = rho_f - mean(rho_f) spectrally on the torus, so phi
/// is the convolution of the interaction kernel with the neutralised density.
/// Throws StateError on non-finite input.
Potential solve_poisson(const Field& rho_f, const PhaseGrid& grid);

/// grad phi alone, skipping the potential itself.
VectorField field_gradient(const Field& rho_f, const PhaseGrid& grid);

/// Spectral Laplacian of a periodic cell field.
Field spectral_laplacian(const Field& values, const PhaseGrid& grid);

/// 1/2 sum_x |grad phi|^2 hx^d for phi = solve_poisson(rho_f).
double coulomb_energy(const Field& rho_f, const PhaseGrid& grid);

/// int |grad Phi|^2 for -Laplace(Phi) = rho_a - rho_b with both means removed.
double coulomb_distance(const Field& rho_a, const Field& rho_b, const PhaseGrid& grid);

}  // namespace entrolimit
