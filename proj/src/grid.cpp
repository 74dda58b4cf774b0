#include "entrolimit/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace entrolimit {

namespace {

Index ipow(Index base, int exp) {
  Index r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

double PhaseGrid::cell_volume() const { return std::pow(hx, dim); }

double PhaseGrid::domain_volume() const { return std::pow(L, dim); }

PhaseGrid PhaseGrid::refined(int factor) const {
  return make_grid(dim, L, nx * factor, vmax, nv);
}

PhaseGrid make_grid(int dim, double L, int nx, double vmax, int nv) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid: dim must be 1, 2 or 3");
  if (!(L > 0.0)) throw std::invalid_argument("grid: L must be positive");
  if (!(vmax > 0.0)) throw std::invalid_argument("grid: Vmax must be positive");
  if (nx < 4) throw std::invalid_argument("grid: Nx must be >= 4");
  if (nv < 4) throw std::invalid_argument("grid: Nv must be >= 4");
  if (nv % 2 != 0)
    throw std::invalid_argument("grid: Nv must be even so the velocity nodes are mirror-symmetric");

  PhaseGrid g;
  g.dim = dim;
  g.L = L;
  g.nx = nx;
  g.hx = L / nx;
  g.vmax = vmax;
  g.nv = nv;
  g.hv = 2.0 * vmax / nv;

  const Index ncells = ipow(nx, dim);
  const Index nvel = ipow(nv, dim);

  g.v1.resize(nv);
  for (int j = 0; j < nv; ++j) g.v1(j) = -vmax + (j + 0.5) * g.hv;
  // Exact mirror symmetry: v1(nv-1-j) == -v1(j) bit for bit.
  for (int j = 0; j < nv / 2; ++j) g.v1(nv - 1 - j) = -g.v1(j);

  g.xc.resize(dim, ncells);
  for (Index c = 0; c < ncells; ++c) {
    Index rem = c;
    for (int k = 0; k < dim; ++k) {
      g.xc(k, c) = (static_cast<double>(rem % nx) + 0.5) * g.hx;
      rem /= nx;
    }
  }

  g.vc.resize(dim, nvel);
  for (Index j = 0; j < nvel; ++j) {
    Index rem = j;
    for (int k = 0; k < dim; ++k) {
      g.vc(k, j) = g.v1(rem % nv);
      rem /= nv;
    }
  }
  g.w = Eigen::ArrayXd::Constant(nvel, std::pow(g.hv, dim));

  g.up.assign(dim, Eigen::ArrayXi(ncells));
  g.down.assign(dim, Eigen::ArrayXi(ncells));
  for (int k = 0; k < dim; ++k) {
    const Index stride = ipow(nx, k);
    for (Index c = 0; c < ncells; ++c) {
      const Index ik = (c / stride) % nx;
      const Index ip = (ik + 1) % nx;
      const Index im = (ik + nx - 1) % nx;
      g.up[k](c) = static_cast<int>(c + (ip - ik) * stride);
      g.down[k](c) = static_cast<int>(c + (im - ik) * stride);
    }
  }
  return g;
}

double velocity_integral(const PhaseGrid& grid, const Eigen::Ref<const Eigen::ArrayXd>& g) {
  if (g.size() != grid.nvel())
    throw std::invalid_argument("velocity_integral: expected " + std::to_string(grid.nvel()) +
                                " node values");
  return (grid.w * g).sum();
}

double spatial_integral(const PhaseGrid& grid, const Eigen::Ref<const Eigen::ArrayXd>& values) {
  return values.sum() * grid.cell_volume();
}

}  // namespace entrolimit
