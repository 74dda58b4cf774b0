#include "entrolimit/fluid.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace entrolimit {

namespace {

using Conserved = Eigen::ArrayXXd;  // (1 + dim) x ncells: rho, m_1..m_d

Conserved pack(const FluidState& s) {
  Conserved u(1 + s.m.rows(), s.rho.size());
  u.row(0) = s.rho.transpose();
  u.bottomRows(s.m.rows()) = s.m;
  return u;
}

FluidState unpack(const Conserved& u, double gamma) {
  FluidState s;
  s.rho = u.row(0).transpose();
  s.m = u.bottomRows(u.rows() - 1);
  s.gamma = gamma;
  return s;
}

void check_positive(const Field& rho, const char* where) {
  for (Index c = 0; c < rho.size(); ++c)
    if (!(rho(c) > 0.0)) {
      std::ostringstream os;
      os << where << ": non-positive density " << rho(c) << " in cell " << c;
      throw StateError(os.str());
    }
}

Eigen::ArrayXd minmod(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
  return 0.5 * (a.sign() + b.sign()) * a.abs().min(b.abs());
}

// Physical flux along one axis and the largest signal speed of a state.
void axis_flux(const Eigen::ArrayXd& state, int axis, double gamma, Eigen::ArrayXd& flux,
               double& speed) {
  const int d = static_cast<int>(state.size()) - 1;
  const double rho = state(0);
  const double un = state(1 + axis) / rho;
  flux.resize(d + 1);
  flux(0) = state(1 + axis);
  for (int l = 0; l < d; ++l) flux(1 + l) = state(1 + l) * un;
  flux(1 + axis) += pressure(rho, gamma);
  speed = std::abs(un) + sound_speed(rho, gamma);
}

Conserved hyperbolic_rhs(const Conserved& u, const PhaseGrid& g, double gamma) {
  const Index nc = u.cols();
  Conserved rhs = Conserved::Zero(u.rows(), nc);
  Conserved slope(u.rows(), nc);
  Conserved flux(u.rows(), nc);
  Eigen::ArrayXd fl, fr;
  for (int k = 0; k < g.dim; ++k) {
    const auto& up = g.up[k];
    const auto& down = g.down[k];
    for (Index c = 0; c < nc; ++c)
      slope.col(c) = minmod(u.col(up(c)) - u.col(c), u.col(c) - u.col(down(c)));
    for (Index c = 0; c < nc; ++c) {
      const Index p = up(c);
      const Eigen::ArrayXd left = u.col(c) + 0.5 * slope.col(c);
      const Eigen::ArrayXd right = u.col(p) - 0.5 * slope.col(p);
      double sl = 0.0, sr = 0.0;
      axis_flux(left, k, gamma, fl, sl);
      axis_flux(right, k, gamma, fr, sr);
      flux.col(c) = 0.5 * (fl + fr) - 0.5 * std::max(sl, sr) * (right - left);
    }
    for (Index c = 0; c < nc; ++c) rhs.col(c) -= (flux.col(c) - flux.col(down(c))) / g.hx;
  }
  return rhs;
}

}  // namespace

VectorField FluidState::velocity() const { return m.rowwise() / rho.transpose(); }

double pressure(double rho, double gamma) {
  if (rho < 0.0) throw std::domain_error("pressure: negative density");
  return std::pow(rho, gamma);
}

double sound_speed(double rho, double gamma) { return std::sqrt(gamma * std::pow(rho, gamma - 1.0)); }

double fluid_stable_dt(const FluidState& state, const PhaseGrid& grid, double cfl) {
  const VectorField u = state.velocity();
  double smax = 0.0;
  for (Index c = 0; c < state.rho.size(); ++c)
    smax = std::max(smax, u.col(c).abs().maxCoeff() + sound_speed(state.rho(c), state.gamma));
  return cfl * grid.hx / smax;
}

VectorField discrete_laplacian(const VectorField& v, const PhaseGrid& grid) {
  VectorField out = VectorField::Zero(v.rows(), v.cols());
  const double inv_h2 = 1.0 / (grid.hx * grid.hx);
  for (int k = 0; k < grid.dim; ++k)
    out += (v(Eigen::all, grid.up[k]) - 2.0 * v + v(Eigen::all, grid.down[k])) * inv_h2;
  return out;
}

double gradient_energy(const VectorField& v, const PhaseGrid& grid) {
  double acc = 0.0;
  for (int k = 0; k < grid.dim; ++k)
    acc += ((v(Eigen::all, grid.up[k]) - v) / grid.hx).square().sum();
  return acc * grid.cell_volume();
}

FluidState fluid_convective_step(const FluidState& state, double dt, const PhaseGrid& grid,
                                 const FluidOptions& opts, FluidStepStats* stats) {
  if (dt < 0.0) throw std::invalid_argument("fluid_step: dt must be >= 0");
  if (dt == 0.0) return state;
  check_positive(state.rho, "fluid_step (input)");
  const double gamma = state.gamma;
  const double limit = fluid_stable_dt(state, grid, 1.0);
  const double ratio = dt / limit;
  if (ratio > opts.cfl * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "fluid_step: CFL violated, dt (max|u| + c) / hx = " << ratio << " > " << opts.cfl;
    throw CflViolation(os.str(), ratio);
  }

  const Conserved u0 = pack(state);
  const Conserved u1 = u0 + dt * hyperbolic_rhs(u0, grid, gamma);
  check_positive(u1.row(0).transpose(), "fluid_step (stage 1)");
  const Conserved u2 = 0.5 * u0 + 0.5 * (u1 + dt * hyperbolic_rhs(u1, grid, gamma));
  FluidState out = unpack(u2, gamma);
  check_positive(out.rho, "fluid_step");

  const Index n = grid.ncells();
  const VectorField vel = out.velocity();
  VectorField vel_new;
  if (opts.viscous == ViscousScheme::Explicit) {
    const double visc_limit = out.rho.minCoeff() * grid.hx * grid.hx / (2.0 * grid.dim);
    if (dt > visc_limit * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "fluid_step: explicit viscous step needs dt <= " << visc_limit;
      throw CflViolation(os.str(), dt / visc_limit);
    }
    vel_new = vel + dt * (discrete_laplacian(vel, grid).rowwise() / out.rho.transpose());
    if (stats) stats->viscous_dissipation += dt * gradient_energy(vel, grid);
  } else {
    // (diag(rho) - dt Laplace_h) u_new = rho u, symmetric positive definite.
    const double c = dt / (grid.hx * grid.hx);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(n * (1 + 2 * grid.dim)));
    for (Index i = 0; i < n; ++i) {
      trip.emplace_back(i, i, out.rho(i) + 2.0 * grid.dim * c);
      for (int k = 0; k < grid.dim; ++k) {
        trip.emplace_back(i, grid.up[k](i), -c);
        trip.emplace_back(i, grid.down[k](i), -c);
      }
    }
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
    if (solver.info() != Eigen::Success) throw StateError("fluid_step: viscous factorisation failed");
    vel_new.resize(grid.dim, n);
    for (int k = 0; k < grid.dim; ++k) {
      const Eigen::VectorXd rhs = out.m.row(k).transpose().matrix();
      vel_new.row(k) = solver.solve(rhs).transpose().array();
    }
    if (stats) stats->viscous_dissipation += dt * gradient_energy(vel_new, grid);
  }
  out.m = vel_new.rowwise() * out.rho.transpose();
  return out;
}

FluidState fluid_step(const FluidState& state, const Moments& mom, double dt,
                      const PhaseGrid& grid, const FluidOptions& opts, FluidStepStats* stats) {
  FluidState out = fluid_convective_step(state, dt, grid, opts, stats);
  if (dt == 0.0) return out;
  VectorField vel = out.velocity();
  for (Index c = 0; c < grid.ncells(); ++c) {
    if (mom.vacuum(c)) continue;
    const double decay = std::exp(-mom.rho_f(c) * dt / out.rho(c));
    vel.col(c) = mom.u_f.col(c) + (vel.col(c) - mom.u_f.col(c)) * decay;
  }
  out.m = vel.rowwise() * out.rho.transpose();
  return out;
}

Eigen::VectorXd coupled_momentum_budget(const FluidState& state, const DistF& f) {
  const Moments mom = moments(f);
  const double vol = f.grid.cell_volume();
  return ((state.m.rowwise().sum() + mom.j_f.rowwise().sum()) * vol).matrix();
}

}  // namespace entrolimit
