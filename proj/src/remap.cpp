#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "entrolimit/kinetic.hpp"

namespace entrolimit {

namespace {

// Where one 1-D node lands under the map, and the weights used to deposit it.
struct Landing {
  int quad_first = 0;  // quadratic stencil covers quad_first .. quad_first + 2
  std::array<double, 3> quad{};
  int cic_first = 0;  // linear stencil covers cic_first, cic_first + 1
  std::array<double, 2> cic{};
  bool escaped = false;
};

Landing land(double p, const PhaseGrid& g) {
  Landing out;
  const int nv = g.nv;
  double q = (p + g.vmax) / g.hv - 0.5;
  if (q < 0.0) {
    q = 0.0;
    out.escaped = true;
  } else if (q > nv - 1) {
    q = nv - 1;
    out.escaped = true;
  }
  // Quadratic Lagrange weights reproduce 1, xi, xi^2 exactly for any offset,
  // so edge nodes just use a shifted three-node stencil.
  const int k = std::clamp(static_cast<int>(std::lround(q)), 1, nv - 2);
  const double dl = q - k;
  out.quad_first = k - 1;
  out.quad = {0.5 * dl * (dl - 1.0), 1.0 - dl * dl, 0.5 * dl * (dl + 1.0)};

  const int k0 = std::min(static_cast<int>(std::floor(q)), nv - 2);
  const double fr = q - k0;
  out.cic_first = k0;
  out.cic = {1.0 - fr, fr};
  return out;
}

struct AxisTables {
  std::vector<std::vector<Landing>> per_axis;  // [axis][1-D node]
};

// Flat velocity index -> per-axis 1-D indices.
std::vector<std::array<int, 3>> decode_nodes(const PhaseGrid& g) {
  std::vector<std::array<int, 3>> idx(g.nvel());
  for (Index j = 0; j < g.nvel(); ++j) {
    Index rem = j;
    for (int k = 0; k < g.dim; ++k) {
      idx[j][k] = static_cast<int>(rem % g.nv);
      rem /= g.nv;
    }
  }
  return idx;
}

template <int Width, typename First, typename Weights>
void deposit(const PhaseGrid& g, const std::vector<std::array<int, 3>>& nodes,
             const std::vector<std::vector<Landing>>& tables,
             const Eigen::Ref<const Eigen::VectorXd>& src, Eigen::Ref<Eigen::VectorXd> dst,
             First first, Weights weights) {
  const int d = g.dim;
  int combos = 1;
  for (int k = 0; k < d; ++k) combos *= Width;
  dst.setZero();
  for (Index j = 0; j < src.size(); ++j) {
    const double val = src(j);
    if (val == 0.0) continue;
    const Landing* l[3] = {nullptr, nullptr, nullptr};
    for (int k = 0; k < d; ++k) l[k] = &tables[k][nodes[j][k]];
    for (int m = 0; m < combos; ++m) {
      int rem = m;
      double wgt = val;
      Index target = 0;
      Index stride = 1;
      for (int k = 0; k < d; ++k) {
        const int o = rem % Width;
        rem /= Width;
        wgt *= weights(*l[k])[o];
        target += (first(*l[k]) + o) * stride;
        stride *= g.nv;
      }
      dst(target) += wgt;
    }
  }
}

// For each source node, the largest value of `need` over its quadratic stencil.
void stencil_max(const PhaseGrid& g, const std::vector<std::array<int, 3>>& nodes,
                 const std::vector<std::vector<Landing>>& tables, const Eigen::VectorXd& need,
                 const Eigen::Ref<const Eigen::VectorXd>& src, Eigen::VectorXd& out) {
  const int d = g.dim;
  int combos = 1;
  for (int k = 0; k < d; ++k) combos *= 3;
  for (Index j = 0; j < src.size(); ++j) {
    if (src(j) == 0.0) continue;
    for (int m = 0; m < combos; ++m) {
      int rem = m;
      Index target = 0;
      Index stride = 1;
      for (int k = 0; k < d; ++k) {
        target += (tables[k][nodes[j][k]].quad_first + rem % 3) * stride;
        rem /= 3;
        stride *= g.nv;
      }
      out(j) = std::max(out(j), need(target));
    }
  }
}

}  // namespace

DistF affine_velocity_map(const DistF& f, double a, const VectorField& shift,
                          const Eigen::Array<bool, Eigen::Dynamic, 1>& skip, RemapStats* stats) {
  const PhaseGrid& g = f.grid;
  if (shift.rows() != g.dim || shift.cols() != g.ncells())
    throw std::invalid_argument("affine_velocity_map: shift must be dim x ncells");
  if (!(a > 0.0 || a == 0.0) || a > 1.0)
    throw std::invalid_argument("affine_velocity_map: contraction factor must lie in [0, 1]");

  DistF out = f;
  RemapStats local;
  const auto nodes = decode_nodes(g);
  std::vector<std::vector<Landing>> tables(g.dim, std::vector<Landing>(g.nv));
  Eigen::VectorXd quad(g.nvel());
  Eigen::VectorXd cic(g.nvel());

  for (Index c = 0; c < g.ncells(); ++c) {
    if (skip(c)) continue;
    if (a == 1.0 && (shift.col(c) == 0.0).all()) continue;
    for (int k = 0; k < g.dim; ++k)
      for (int j = 0; j < g.nv; ++j) tables[k][j] = land(a * g.v1(j) + shift(k, c), g);

    const auto src = f.data.col(c);
    const double src_mass = (g.w * src.array()).sum();
    if (src_mass <= 0.0) continue;

    double escaped = 0.0;
    for (Index j = 0; j < g.nvel(); ++j) {
      bool esc = false;
      for (int k = 0; k < g.dim; ++k) esc = esc || tables[k][nodes[j][k]].escaped;
      if (esc) escaped += g.w(j) * src(j);
    }
    if (escaped > 0.0) {
      local.escaped_mass += escaped * g.cell_volume();
      if (escaped > 1e-12 * src_mass) ++local.warnings;
    }

    deposit<3>(g, nodes, tables, src, quad, [](const Landing& l) { return l.quad_first; },
               [](const Landing& l) -> const std::array<double, 3>& { return l.quad; });

    // Negative values below this level are roundoff from the far tails.
    const double thr = 1e-13 * quad.maxCoeff();
    auto has_negative = [&](const Eigen::VectorXd& v) { return (v.array() < -thr).any(); };
    if (has_negative(quad)) {
      ++local.limited_cells;
      deposit<2>(g, nodes, tables, src, cic, [](const Landing& l) { return l.cic_first; },
                 [](const Landing& l) -> const std::array<double, 2>& { return l.cic; });
      // Switch only the source nodes feeding negative values toward linear
      // weights, so the moments of the bulk stay exact.
      Eigen::VectorXd beta = Eigen::VectorXd::Zero(g.nvel());
      Eigen::VectorXd need(g.nvel());
      Eigen::VectorXd mixed = quad;
      for (int pass = 0; pass < 4 && has_negative(mixed); ++pass) {
        for (Index j = 0; j < need.size(); ++j)
          need(j) = mixed(j) < -thr ? std::min(1.0, -quad(j) / std::max(cic(j) - quad(j), 1e-300)) : 0.0;
        Eigen::VectorXd grow = Eigen::VectorXd::Zero(g.nvel());
        stencil_max(g, nodes, tables, need, src, grow);
        // Each pass at least doubles the blend where it is still short.
        for (Index j = 0; j < beta.size(); ++j)
          if (grow(j) > 0.0) beta(j) = std::min(1.0, std::max({grow(j), 2.0 * beta(j), beta(j) + 0.25}));
        const Eigen::VectorXd lin_part = src.cwiseProduct(beta);
        const Eigen::VectorXd quad_part = src - lin_part;
        Eigen::VectorXd a_dep(g.nvel()), b_dep(g.nvel());
        deposit<3>(g, nodes, tables, quad_part, a_dep, [](const Landing& l) { return l.quad_first; },
                   [](const Landing& l) -> const std::array<double, 3>& { return l.quad; });
        deposit<2>(g, nodes, tables, lin_part, b_dep, [](const Landing& l) { return l.cic_first; },
                   [](const Landing& l) -> const std::array<double, 2>& { return l.cic; });
        mixed = a_dep + b_dep;
      }
      if (has_negative(mixed)) {
        double blend = 0.0;
        for (Index j = 0; j < mixed.size(); ++j)
          if (mixed(j) < -thr) blend = std::max(blend, -mixed(j) / (cic(j) - mixed(j)));
        blend = std::min(blend, 1.0);
        mixed = (1.0 - blend) * mixed + blend * cic;
      }
      quad = mixed;
    }

    double clipped = 0.0;
    for (Index j = 0; j < quad.size(); ++j)
      if (quad(j) < 0.0) {
        clipped -= g.w(j) * quad(j);
        quad(j) = 0.0;
      }
    local.clipped_mass += clipped * g.cell_volume();
    const double new_mass = (g.w * quad.array()).sum();
    if (new_mass > 0.0) quad *= src_mass / new_mass;
    out.data.col(c) = quad;
  }
  if (stats) *stats += local;
  return out;
}

}  // namespace entrolimit
