#include "entrolimit/io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace entrolimit {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string entropy_csv(const std::vector<EntropyReport>& traj) {
  std::ostringstream os;
  os << "t,F,D1,D2,H_rel,P_rel,coulomb_rel,drag_rel,visc_rel,stress_l1,mass_drift,momentum_drift,"
        "align_int,stress_int,drag_diss_int,slip_int,visc_int,drag_rel_int,visc_rel_int\n";
  for (const auto& r : traj) {
    const double row[] = {r.t,          r.F,           r.D1,           r.D2,         r.H_rel,
                          r.P_rel,      r.coulomb_rel, r.drag_rel,     r.visc_rel,   r.stress_l1,
                          r.mass_drift, r.momentum_drift, r.align_int, r.stress_int, r.drag_diss_int,
                          r.slip_int,   r.visc_int,    r.drag_rel_int, r.visc_rel_int};
    bool first = true;
    for (double v : row) {
      os << (first ? "" : ",") << format_double(v);
      first = false;
    }
    os << '\n';
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_entropy_csv(const std::filesystem::path& path, const std::vector<EntropyReport>& traj) {
  write_text(path, entropy_csv(traj));
}

namespace {

void fluid_columns(std::ostringstream& os, const PhaseGrid& g, Index c, double rho,
                   const VectorField& u, double gamma) {
  for (int k = 0; k < g.dim; ++k) os << format_double(g.xc(k, c)) << ',';
  os << format_double(rho);
  for (int k = 0; k < g.dim; ++k) os << ',' << format_double(u(k, c));
  os << ',' << format_double(pressure(rho, gamma));
}

std::string fluid_header(int dim) {
  std::string h;
  for (int k = 0; k < dim; ++k) h += "x_" + std::to_string(k + 1) + ",";
  h += "rho";
  for (int k = 0; k < dim; ++k) h += ",u_" + std::to_string(k + 1);
  return h + ",p";
}

}  // namespace

void write_fluid_csv(const std::filesystem::path& path, const PhaseGrid& grid,
                     const FluidState& state) {
  std::ostringstream os;
  os << fluid_header(grid.dim) << '\n';
  const VectorField u = state.velocity();
  for (Index c = 0; c < grid.ncells(); ++c) {
    fluid_columns(os, grid, c, state.rho(c), u, state.gamma);
    os << '\n';
  }
  write_text(path, os.str());
}

void write_limit_csv(const std::filesystem::path& path, const PhaseGrid& grid,
                     const LimitState& U, double gamma) {
  std::ostringstream os;
  os << fluid_header(grid.dim) << ",rho_f";
  for (int k = 0; k < grid.dim; ++k) os << ",u_f_" << k + 1;
  os << '\n';
  const VectorField u = U.u();
  const VectorField uf = U.u_f();
  for (Index c = 0; c < grid.ncells(); ++c) {
    fluid_columns(os, grid, c, U.rho(c), u, gamma);
    os << ',' << format_double(U.rho_f(c));
    for (int k = 0; k < grid.dim; ++k) os << ',' << format_double(uf(k, c));
    os << '\n';
  }
  write_text(path, os.str());
}

void write_snapshot(const std::filesystem::path& path, const DistF& f) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::int32_t head[3] = {f.grid.dim, f.grid.nx, f.grid.nv};
  const double box[2] = {f.grid.L, f.grid.vmax};
  out.write(reinterpret_cast<const char*>(head), sizeof(head));
  out.write(reinterpret_cast<const char*>(box), sizeof(box));
  out.write(reinterpret_cast<const char*>(f.data.data()),
            static_cast<std::streamsize>(f.data.size() * sizeof(double)));
}

DistF read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::int32_t head[3];
  double box[2];
  in.read(reinterpret_cast<char*>(head), sizeof(head));
  in.read(reinterpret_cast<char*>(box), sizeof(box));
  if (!in) throw std::runtime_error("truncated snapshot header in " + path.string());
  DistF f = zero_distribution(make_grid(head[0], box[0], head[1], box[1], head[2]));
  in.read(reinterpret_cast<char*>(f.data.data()),
          static_cast<std::streamsize>(f.data.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated snapshot data in " + path.string());
  return f;
}

}  // namespace entrolimit
