#include "entrolimit/poisson.hpp"

#include <cmath>
#include <array>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace entrolimit {

namespace {

using cplx = std::complex<double>;

// In-place d-dimensional FFT as successive 1-D transforms along each axis.
void fft_nd(std::vector<cplx>& data, int dim, int n, bool inverse) {
  thread_local Eigen::FFT<double> fft;  // keeps its plans between calls
  std::vector<cplx> line(n), res(n);
  const Index total = static_cast<Index>(data.size());
  Index stride = 1;
  for (int k = 0; k < dim; ++k) {
    for (Index start = 0; start < total; ++start) {
      if ((start / stride) % n != 0) continue;
      for (int i = 0; i < n; ++i) line[i] = data[start + i * stride];
      if (inverse)
        fft.inv(res, line);
      else
        fft.fwd(res, line);
      for (int i = 0; i < n; ++i) data[start + i * stride] = res[i];
    }
    stride *= n;
  }
}

// Integer wavenumber per axis for a flat spectral index.
std::vector<std::array<int, 3>> wave_indices(const PhaseGrid& g) {
  std::vector<std::array<int, 3>> out(g.ncells());
  for (Index c = 0; c < g.ncells(); ++c) {
    Index rem = c;
    for (int k = 0; k < g.dim; ++k) {
      const int m = static_cast<int>(rem % g.nx);
      rem /= g.nx;
      out[c][k] = (m <= g.nx / 2) ? m : m - g.nx;
    }
  }
  return out;
}

std::vector<cplx> to_complex(const Field& f) {
  std::vector<cplx> out(f.size());
  for (Index i = 0; i < f.size(); ++i) out[i] = cplx(f(i), 0.0);
  return out;
}

Field real_part(const std::vector<cplx>& v) {
  Field out(static_cast<Index>(v.size()));
  for (Index i = 0; i < out.size(); ++i) out(i) = v[i].real();
  return out;
}

}  // namespace

namespace {

// Transformed neutralised source divided by |k|^2, i.e. the spectrum of phi.
std::vector<cplx> potential_spectrum(const Field& rho_f, const PhaseGrid& grid, double& mean,
                                     std::vector<std::array<int, 3>>& waves) {
  if (rho_f.size() != grid.ncells())
    throw std::invalid_argument("solve_poisson: source size does not match grid");
  if (!rho_f.allFinite()) throw StateError("solve_poisson: non-finite value in source");
  const double kscale = 2.0 * std::numbers::pi / grid.L;
  mean = rho_f.mean();
  std::vector<cplx> hat = to_complex(rho_f - mean);
  fft_nd(hat, grid.dim, grid.nx, false);
  waves = wave_indices(grid);
  for (Index c = 0; c < grid.ncells(); ++c) {
    double k2 = 0.0;
    for (int k = 0; k < grid.dim; ++k) k2 += std::pow(kscale * waves[c][k], 2);
    hat[c] = (k2 > 0.0) ? hat[c] / k2 : cplx(0.0, 0.0);
  }
  return hat;
}

VectorField spectral_gradient(const std::vector<cplx>& hat, const PhaseGrid& grid,
                              const std::vector<std::array<int, 3>>& waves) {
  const double kscale = 2.0 * std::numbers::pi / grid.L;
  VectorField out(grid.dim, grid.ncells());
  std::vector<cplx> d(hat.size());
  for (int k = 0; k < grid.dim; ++k) {
    for (Index c = 0; c < grid.ncells(); ++c) {
      const int m = waves[c][k];
      // The Nyquist mode has no real derivative on the grid.
      const bool nyquist = (grid.nx % 2 == 0) && (std::abs(m) == grid.nx / 2);
      d[c] = nyquist ? cplx(0.0, 0.0) : cplx(-kscale * m * hat[c].imag(), kscale * m * hat[c].real());
    }
    fft_nd(d, grid.dim, grid.nx, true);
    out.row(k) = real_part(d).transpose();
  }
  return out;
}

}  // namespace

Potential solve_poisson(const Field& rho_f, const PhaseGrid& grid) {
  Potential out;
  std::vector<std::array<int, 3>> waves;
  const std::vector<cplx> hat = potential_spectrum(rho_f, grid, out.removed_mean, waves);
  std::vector<cplx> phi = hat;
  fft_nd(phi, grid.dim, grid.nx, true);
  out.phi = real_part(phi);
  out.phi -= out.phi.mean();
  out.grad_phi = spectral_gradient(hat, grid, waves);
  return out;
}

VectorField field_gradient(const Field& rho_f, const PhaseGrid& grid) {
  double mean = 0.0;
  std::vector<std::array<int, 3>> waves;
  const std::vector<cplx> hat = potential_spectrum(rho_f, grid, mean, waves);
  return spectral_gradient(hat, grid, waves);
}

Field spectral_laplacian(const Field& values, const PhaseGrid& grid) {
  const double kscale = 2.0 * std::numbers::pi / grid.L;
  std::vector<cplx> hat = to_complex(values);
  fft_nd(hat, grid.dim, grid.nx, false);
  const auto waves = wave_indices(grid);
  for (Index c = 0; c < grid.ncells(); ++c) {
    double k2 = 0.0;
    for (int k = 0; k < grid.dim; ++k) k2 += std::pow(kscale * waves[c][k], 2);
    hat[c] *= -k2;
  }
  fft_nd(hat, grid.dim, grid.nx, true);
  return real_part(hat);
}

double coulomb_energy(const Field& rho_f, const PhaseGrid& grid) {
  const Potential p = solve_poisson(rho_f, grid);
  return 0.5 * p.grad_phi.square().sum() * grid.cell_volume();
}

double coulomb_distance(const Field& rho_a, const Field& rho_b, const PhaseGrid& grid) {
  const Potential p = solve_poisson(rho_a - rho_b, grid);
  return p.grad_phi.square().sum() * grid.cell_volume();
}

}  // namespace entrolimit
