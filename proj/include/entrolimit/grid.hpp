#pragma once

#include <vector>

#include "entrolimit/types.hpp"

namespace entrolimit {

/// Periodic spatial mesh on [0, L)^d times a midpoint velocity mesh on
/// (-Vmax, Vmax)^d. Multi-indices are flattened with axis 0 fastest.
struct PhaseGrid {
  int dim = 1;
  double L = 1.0;
  int nx = 0;
  double hx = 0.0;
  double vmax = 0.0;
  int nv = 0;
  double hv = 0.0;

  Eigen::MatrixXd xc;  ///< dim x ncells, cell centres
  Eigen::MatrixXd vc;  ///< dim x nvel, velocity nodes
  Eigen::ArrayXd v1;   ///< nv velocity nodes along one axis
  Eigen::ArrayXd w;    ///< nvel quadrature weights (hv^d each)

  /// Periodic neighbours per axis: up[k](c) is the cell after c along axis k.
  std::vector<Eigen::ArrayXi> up;
  std::vector<Eigen::ArrayXi> down;

  Index ncells() const { return xc.cols(); }
  Index nvel() const { return vc.cols(); }
  double cell_volume() const;
  double domain_volume() const;
  /// Largest |node speed| along one axis, Vmax - hv/2.
  double max_node_speed() const { return vmax - 0.5 * hv; }

  /// Same spatial period and velocity box with the spatial resolution scaled.
  PhaseGrid refined(int factor) const;
};

/// Throws std::invalid_argument on dim outside 1..3, nx < 4, nv < 4, odd nv,
/// or non-positive L / vmax.
PhaseGrid make_grid(int dim, double L, int nx, double vmax, int nv);

/// Sum_j w[j] g[j] over the velocity nodes.
double velocity_integral(const PhaseGrid& grid, const Eigen::Ref<const Eigen::ArrayXd>& g);

/// Sum over cells of values times hx^d.
double spatial_integral(const PhaseGrid& grid, const Eigen::Ref<const Eigen::ArrayXd>& values);

}  // namespace entrolimit
