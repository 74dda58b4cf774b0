#include "entrolimit/limit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "entrolimit/fluid.hpp"
#include "entrolimit/kinetic.hpp"
#include "entrolimit/poisson.hpp"

namespace entrolimit {

namespace {

VectorField safe_divide(const VectorField& num, const Field& den) {
  const double floor = kVacuumFraction * std::max(den.mean(), 0.0);
  VectorField out = VectorField::Zero(num.rows(), num.cols());
  for (Index c = 0; c < den.size(); ++c)
    if (den(c) > floor) out.col(c) = num.col(c) / den(c);
  return out;
}

// Centred divergence of a flux given per axis as one row per component.
Eigen::ArrayXXd centred_divergence(const std::vector<Eigen::ArrayXXd>& flux, const PhaseGrid& g) {
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(flux[0].rows(), flux[0].cols());
  const double inv = 0.5 / g.hx;
  for (int k = 0; k < g.dim; ++k)
    out += (flux[k](Eigen::all, g.up[k]) - flux[k](Eigen::all, g.down[k])) * inv;
  return out;
}

Eigen::ArrayXXd laplacian(const Eigen::ArrayXXd& v, const PhaseGrid& g) {
  return discrete_laplacian(v, g);
}

double max_velocity_gradient(const VectorField& u, const PhaseGrid& g) {
  double out = 0.0;
  for (int k = 0; k < g.dim; ++k)
    out = std::max(out, ((u(Eigen::all, g.up[k]) - u(Eigen::all, g.down[k])).abs() / (2.0 * g.hx))
                            .maxCoeff());
  return out;
}

}  // namespace

VectorField LimitState::u_f() const { return safe_divide(omega, rho_f); }

VectorField LimitState::u() const { return m.rowwise() / rho.transpose(); }

LimitState& LimitState::operator+=(const LimitState& o) {
  rho_f += o.rho_f;
  omega += o.omega;
  rho += o.rho;
  m += o.m;
  return *this;
}

LimitState& LimitState::operator*=(double s) {
  rho_f *= s;
  omega *= s;
  rho *= s;
  m *= s;
  return *this;
}

LimitState operator+(LimitState a, const LimitState& b) { return a += b; }
LimitState operator*(double s, LimitState a) { return a *= s; }

VectorField limit_field_force(const LimitState& U, const PhaseGrid& grid) {
  return -(field_gradient(U.rho_f, grid).rowwise() * U.rho_f.transpose());
}

LimitState limit_rhs(const LimitState& U, const PhaseGrid& grid, const LimitOptions& opts) {
  const int d = grid.dim;
  const Index nc = grid.ncells();
  if ((U.rho <= 0.0).any()) throw StateError("limit_rhs: non-positive fluid density");

  const VectorField uf = U.u_f();
  const VectorField u = U.u();
  const Field p = U.rho.unaryExpr([&](double r) { return pressure(r, opts.gamma); });

  // Stack (rho_f, omega, rho, m) so one centred divergence handles all fluxes.
  const Index rows = 2 * (1 + d);
  std::vector<Eigen::ArrayXXd> flux(d, Eigen::ArrayXXd(rows, nc));
  for (int k = 0; k < d; ++k) {
    auto& F = flux[k];
    F.row(0) = U.omega.row(k);
    for (int l = 0; l < d; ++l) F.row(1 + l) = U.omega.row(l) * uf.row(k);
    F.row(1 + d) = U.m.row(k);
    for (int l = 0; l < d; ++l) F.row(2 + d + l) = U.m.row(l) * u.row(k);
    F.row(2 + d + k) += p.transpose();
  }
  Eigen::ArrayXXd div = centred_divergence(flux, grid);

  const VectorField drag = (u - uf).rowwise() * U.rho_f.transpose();  // rho_f (u - u_f)
  const VectorField field = limit_field_force(U, grid);

  LimitState out;
  out.rho_f = -div.row(0).transpose();
  out.omega = -div.middleRows(1, d) + drag + field;
  out.rho = -div.row(1 + d).transpose();
  out.m = -div.bottomRows(d) + discrete_laplacian(u, grid) - drag;

  if (opts.hyperviscosity > 0.0) {
    const double nu = opts.hyperviscosity;
    out.rho_f += nu * laplacian(U.rho_f.transpose(), grid).row(0).transpose();
    out.omega += nu * laplacian(U.omega, grid);
    out.rho += nu * laplacian(U.rho.transpose(), grid).row(0).transpose();
    out.m += nu * laplacian(U.m, grid);
  }
  return out;
}

LimitState limit_step(const LimitState& U, double dt, const PhaseGrid& grid,
                      const LimitOptions& opts) {
  if (dt < 0.0) throw std::invalid_argument("limit_step: dt must be >= 0");
  if (dt == 0.0) return U;
  const double grad = max_velocity_gradient(U.u_f(), grid);
  if (grad * dt > 1.0) {
    std::ostringstream os;
    os << "limit_step: smoothness lost, max|grad u_f| dt = " << grad * dt;
    throw SmoothnessLost(os.str());
  }
  const LimitState k1 = limit_rhs(U, grid, opts);
  const LimitState k2 = limit_rhs(U + (0.5 * dt) * k1, grid, opts);
  const LimitState k3 = limit_rhs(U + (0.5 * dt) * k2, grid, opts);
  const LimitState k4 = limit_rhs(U + dt * k3, grid, opts);
  LimitState out = U + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  for (Index c = 0; c < out.rho.size(); ++c)
    if (!(out.rho(c) > 0.0) || !std::isfinite(out.rho_f(c))) {
      std::ostringstream os;
      os << "limit_step: invalid state in cell " << c << " (rho = " << out.rho(c)
         << ", rho_f = " << out.rho_f(c) << ")";
      throw StateError(os.str());
    }
  return out;
}

double limit_stable_dt(const LimitState& U, const PhaseGrid& grid, const LimitOptions& opts,
                       double cfl) {
  const VectorField uf = U.u_f();
  const VectorField u = U.u();
  double speed = uf.abs().maxCoeff();
  for (Index c = 0; c < U.rho.size(); ++c)
    speed = std::max(speed, u.col(c).abs().maxCoeff() + sound_speed(U.rho(c), opts.gamma));
  const double h2 = grid.hx * grid.hx;
  // RK4 covers roughly [-2.78, 0] on the real axis.
  const double diffusion = 4.0 * grid.dim / h2 * (1.0 / U.rho.minCoeff() + opts.hyperviscosity);
  const double drag = (U.rho_f * (1.0 + U.rho_f / U.rho)).maxCoeff();
  double dt = cfl * grid.hx / std::max(speed, 1e-300);
  dt = std::min(dt, 0.8 * 2.78 / diffusion);
  if (drag > 0.0) dt = std::min(dt, 0.8 * 2.78 / drag);
  return dt;
}

std::vector<LimitState> integrate_limit(const LimitState& U0, const PhaseGrid& grid,
                                        const LimitOptions& opts, const std::vector<double>& times,
                                        double cfl) {
  std::vector<LimitState> out;
  out.reserve(times.size());
  LimitState U = U0;
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw std::invalid_argument("integrate_limit: times must be non-decreasing");
    const double span = target - t;
    if (span > 0.0) {
      const double dt_max = limit_stable_dt(U, grid, opts, cfl);
      const auto n = static_cast<long>(std::ceil(span / dt_max * (1.0 - 1e-12)));
      const double dt = span / static_cast<double>(std::max(n, 1L));
      for (long i = 0; i < std::max(n, 1L); ++i) U = limit_step(U, dt, grid, opts);
      t = target;
    }
    out.push_back(U);
  }
  return out;
}

Field restrict_field(const Field& fine, const PhaseGrid& fine_grid, int factor) {
  const int d = fine_grid.dim;
  const int nf = fine_grid.nx;
  const int nc = nf / factor;
  Index ncoarse = 1;
  for (int k = 0; k < d; ++k) ncoarse *= nc;
  Field out = Field::Zero(ncoarse);
  for (Index c = 0; c < fine.size(); ++c) {
    Index rem = c, coarse = 0, stride = 1;
    for (int k = 0; k < d; ++k) {
      const Index i = rem % nf;
      rem /= nf;
      coarse += (i / factor) * stride;
      stride *= nc;
    }
    out(coarse) += fine(c);
  }
  return out / std::pow(static_cast<double>(factor), d);
}

LimitState restrict_state(const LimitState& fine, const PhaseGrid& fine_grid, int factor) {
  auto rows = [&](const VectorField& v) {
    VectorField out(v.rows(), 0);
    for (Index r = 0; r < v.rows(); ++r) {
      const Field row = restrict_field(v.row(r).transpose(), fine_grid, factor);
      if (r == 0) out.resize(v.rows(), row.size());
      out.row(r) = row.transpose();
    }
    return out;
  };
  LimitState out;
  out.rho_f = restrict_field(fine.rho_f, fine_grid, factor);
  out.omega = rows(fine.omega);
  out.rho = restrict_field(fine.rho, fine_grid, factor);
  out.m = rows(fine.m);
  return out;
}

Eigen::VectorXd total(const VectorField& v, const PhaseGrid& grid) {
  return (v.rowwise().sum() * grid.cell_volume()).matrix();
}

}  // namespace entrolimit
