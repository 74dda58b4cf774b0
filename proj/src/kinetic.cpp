#include "entrolimit/kinetic.hpp"

#include <cmath>
#include <sstream>

namespace entrolimit {

double DistF::mass() const {
  return (grid.w.matrix().transpose() * data).sum() * grid.cell_volume();
}

DistF zero_distribution(const PhaseGrid& grid) {
  return DistF{grid, Eigen::MatrixXd::Zero(grid.nvel(), grid.ncells())};
}

RemapStats& RemapStats::operator+=(const RemapStats& o) {
  clipped_mass += o.clipped_mass;
  escaped_mass += o.escaped_mass;
  limited_cells += o.limited_cells;
  warnings += o.warnings;
  return *this;
}

Moments moments(const DistF& f) {
  const PhaseGrid& g = f.grid;
  const int d = g.dim;
  const Index nc = g.ncells();

  Moments m;
  m.rho_f = (g.w.matrix().transpose() * f.data).transpose().array();
  const Eigen::MatrixXd vw = (g.vc.array().rowwise() * g.w.transpose()).matrix();
  m.j_f = (vw * f.data).array();

  Eigen::MatrixXd vv(d * d, g.nvel());
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      vv.row(k * d + l) = (vw.row(k).array() * g.vc.row(l).array()).matrix();
  m.S = (vv * f.data).array();

  const double mean = m.rho_f.mean();
  const double floor = kVacuumFraction * mean;
  m.vacuum = (m.rho_f <= floor);
  m.u_f = VectorField::Zero(d, nc);
  for (Index c = 0; c < nc; ++c)
    if (!m.vacuum(c)) m.u_f.col(c) = m.j_f.col(c) / m.rho_f(c);
  return m;
}

Field centred_second_moment(const DistF& f, const VectorField& centre) {
  const PhaseGrid& g = f.grid;
  Field out(g.ncells());
  for (Index c = 0; c < g.ncells(); ++c) {
    const Eigen::ArrayXd r2 =
        (g.vc.colwise() - centre.col(c).matrix()).colwise().squaredNorm().transpose().array();
    out(c) = (g.w * r2 * f.data.col(c).array()).sum();
  }
  return out;
}

Eigen::ArrayXXd kinetic_stress(const DistF& f) {
  const PhaseGrid& g = f.grid;
  const int d = g.dim;
  const Moments m = moments(f);
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(d * d, g.ncells());
  for (Index c = 0; c < g.ncells(); ++c) {
    if (m.vacuum(c)) continue;
    const Eigen::MatrixXd dev = g.vc.colwise() - m.u_f.col(c).matrix();
    const Eigen::ArrayXd wf = g.w * f.data.col(c).array();
    const Eigen::MatrixXd weighted = (dev.array().rowwise() * wf.transpose()).matrix();
    const Eigen::MatrixXd s = weighted * dev.transpose();
    out.col(c) = Eigen::Map<const Eigen::ArrayXd>(s.data(), d * d);
  }
  return out;
}

namespace {

void clip_negative(Eigen::MatrixXd& data, const PhaseGrid& g, RemapStats* stats) {
  double clipped = 0.0;
  for (Index c = 0; c < data.cols(); ++c)
    for (Index j = 0; j < data.rows(); ++j)
      if (data(j, c) < 0.0) {
        clipped -= data(j, c) * g.w(j);
        data(j, c) = 0.0;
      }
  if (stats) stats->clipped_mass += clipped * g.cell_volume();
}

// Second-order upwind with minmod-limited differences; one stage, TVD for |nu| <= 1.
void advect_axis_fv(Eigen::MatrixXd& f, const PhaseGrid& g, int axis, double dt) {
  const Eigen::ArrayXd nu = g.vc.row(axis).transpose().array() * (dt / g.hx);
  const Eigen::ArrayXd cp = nu.max(0.0);
  const Eigen::ArrayXd cm = nu.min(0.0);
  const Eigen::ArrayXd hp = 0.5 * (1.0 - nu);
  const Eigen::ArrayXd hm = 0.5 * (1.0 + nu);
  const auto& up = g.up[axis];
  const auto& down = g.down[axis];
  const Index nc = f.cols();

  Eigen::MatrixXd slope(f.rows(), nc);
  for (Index c = 0; c < nc; ++c) {
    const Eigen::ArrayXd a = f.col(up(c)).array() - f.col(c).array();
    const Eigen::ArrayXd b = f.col(c).array() - f.col(down(c)).array();
    slope.col(c) = (0.5 * (a.sign() + b.sign()) * a.abs().min(b.abs())).matrix();
  }
  // flux(:, c) crosses the face between c and up(c), already scaled by dt/hx.
  Eigen::MatrixXd flux(f.rows(), nc);
  for (Index c = 0; c < nc; ++c) {
    const Index p = up(c);
    flux.col(c) = (cp * (f.col(c).array() + hp * slope.col(c).array()) +
                   cm * (f.col(p).array() - hm * slope.col(p).array()))
                      .matrix();
  }
  for (Index c = 0; c < nc; ++c) f.col(c) -= flux.col(c) - flux.col(down(c));
}

void advect_axis_sl(Eigen::MatrixXd& f, const PhaseGrid& g, int axis, double dt,
                    RemapStats* stats) {
  const Index nc = f.cols();
  const Index nv = f.rows();
  const int nx = g.nx;
  Index stride = 1;
  for (int k = 0; k < axis; ++k) stride *= nx;

  Eigen::ArrayXd row_mass = f.rowwise().sum().array();
  Eigen::MatrixXd out(nv, nc);
  for (Index j = 0; j < nv; ++j) {
    const double s = g.vc(axis, j) * dt / g.hx;
    const double n = std::floor(s);
    const double tau = 1.0 - (s - n);
    const double wts[4] = {-tau * (tau - 1.0) * (tau - 2.0) / 6.0,
                           (tau + 1.0) * (tau - 1.0) * (tau - 2.0) / 2.0,
                           -(tau + 1.0) * tau * (tau - 2.0) / 2.0,
                           (tau + 1.0) * tau * (tau - 1.0) / 6.0};
    const long shift = static_cast<long>(n) + 1;
    for (Index c = 0; c < nc; ++c) {
      const long ik = static_cast<long>((c / stride) % nx);
      const Index base = c - ik * stride;
      double acc = 0.0;
      for (int m = 0; m < 4; ++m) {
        long src = (ik - shift + (m - 1)) % nx;
        if (src < 0) src += nx;
        acc += wts[m] * f(j, base + src * stride);
      }
      out(j, c) = acc;
    }
  }
  clip_negative(out, g, stats);
  // Restore the per-node mass that clipping removed.
  const Eigen::ArrayXd new_mass = out.rowwise().sum().array();
  for (Index j = 0; j < nv; ++j)
    if (new_mass(j) > 0.0) out.row(j) *= row_mass(j) / new_mass(j);
  f = std::move(out);
}

}  // namespace

DistF transport_substep(const DistF& f, double dt, TransportScheme scheme, RemapStats* stats) {
  if (dt < 0.0) throw std::invalid_argument("transport_substep: dt must be >= 0");
  DistF out = f;
  if (dt == 0.0) return out;
  const PhaseGrid& g = f.grid;
  if (scheme == TransportScheme::FiniteVolume) {
    const double ratio = dt * g.max_node_speed() / g.hx;
    if (ratio > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "transport_substep: CFL violated, dt*max|xi|/hx = " << ratio << " > 1";
      throw CflViolation(os.str(), ratio);
    }
    for (int k = 0; k < g.dim; ++k) advect_axis_fv(out.data, g, k, dt);
    clip_negative(out.data, g, stats);
  } else {
    for (int k = 0; k < g.dim; ++k) advect_axis_sl(out.data, g, k, dt, stats);
  }
  return out;
}

DistF drag_field_substep(const DistF& f, const VectorField& u, const VectorField& grad_phi,
                         double dt, RemapStats* stats) {
  if (dt < 0.0) throw std::invalid_argument("drag_field_substep: dt must be >= 0");
  if (dt == 0.0) return f;
  const Moments m = moments(f);
  const double a = std::exp(-dt);
  const VectorField shift = (1.0 - a) * (u - grad_phi);
  return affine_velocity_map(f, a, shift, m.vacuum, stats);
}

DistF alignment_substep(const DistF& f, double dt, double epsilon, RemapStats* stats) {
  if (dt < 0.0) throw std::invalid_argument("alignment_substep: dt must be >= 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("alignment_substep: epsilon must be > 0");
  if (dt == 0.0) return f;
  const Moments m = moments(f);
  const double a = std::exp(-dt / epsilon);
  const VectorField shift = (1.0 - a) * m.u_f;
  return affine_velocity_map(f, a, shift, m.vacuum, stats);
}

}  // namespace entrolimit
