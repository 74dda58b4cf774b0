#include "entrolimit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "entrolimit/io.hpp"
#include "entrolimit/poisson.hpp"

namespace entrolimit {

namespace {

constexpr double kTailTolerance = 1e-12;
constexpr double kNeutralityTolerance = 1e-10;

BaseProfiles read_profile_file(const std::string& path, const PhaseGrid& grid) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("profile: cannot read " + path);
  const int d = grid.dim;
  BaseProfiles b;
  b.rho_f0.resize(grid.ncells());
  b.u_f0.resize(d, grid.ncells());
  b.rho0.resize(grid.ncells());
  b.u0.resize(d, grid.ncells());
  std::string line;
  Index c = 0;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::vector<double> v;
    for (double x; ss >> x;) v.push_back(x);
    if (v.empty()) continue;
    if (static_cast<int>(v.size()) != 2 + 2 * d)
      throw std::invalid_argument("profile: expected " + std::to_string(2 + 2 * d) +
                                  " values per line in " + path);
    if (c >= grid.ncells()) throw std::invalid_argument("profile: more cells than the grid in " + path);
    b.rho_f0(c) = v[0];
    for (int k = 0; k < d; ++k) b.u_f0(k, c) = v[1 + k];
    b.rho0(c) = v[1 + d];
    for (int k = 0; k < d; ++k) b.u0(k, c) = v[2 + d + k];
    ++c;
  }
  if (c != grid.ncells()) throw std::invalid_argument("profile: fewer cells than the grid in " + path);
  return b;
}

EntropyReport make_report(double t, const CoupledStepper& s, const LimitState& U, double mass_p0,
                          double mass_f0, const Eigen::VectorXd& P0) {
  const DistF& f = s.f();
  const PhaseGrid& g = f.grid;
  const FluidState& fluid = s.fluid();
  const Moments mom = moments(f);
  EntropyReport r = relative_entropy(mom, fluid, U, g);
  r.t = t;
  r.F = energy_functional(f, fluid);
  r.D1 = dissipation_D1(f);
  r.D2 = dissipation_D2(f, fluid.velocity());
  r.stress_l1 = r.D1;
  const double mp = f.mass();
  const double mf = fluid.rho.sum() * g.cell_volume();
  r.mass_drift = std::max(std::abs(mp - mass_p0) / mass_p0, std::abs(mf - mass_f0) / mass_f0);
  const Eigen::VectorXd P = coupled_momentum_budget(fluid, f);
  r.momentum_drift = (P - P0 - s.budget().electric_impulse).cwiseAbs().maxCoeff();
  const CoupledBudget& b = s.budget();
  r.align_int = b.align_int;
  r.stress_int = b.stress_int;
  r.drag_diss_int = b.drag_diss_int;
  r.slip_int = b.slip_int;
  r.visc_int = b.visc_int;
  return r;
}

std::string eps_tag(double eps) { return format_double(eps); }

}  // namespace

BaseProfiles sample_profile(const ProfileSpec& spec, const PhaseGrid& grid) {
  if (spec.kind == "file") return read_profile_file(spec.file, grid);
  if (spec.kind != "canonical") throw std::invalid_argument("profile: unknown kind " + spec.kind);
  const int d = grid.dim;
  const Index n = grid.ncells();
  const double k0 = 2.0 * std::numbers::pi / grid.L;
  BaseProfiles b;
  b.rho_f0 = Field::Constant(n, 1.0);
  b.rho0 = Field::Constant(n, 1.0);
  b.u_f0.resize(d, n);
  b.u0.resize(d, n);
  for (int k = 0; k < d; ++k) {
    const Eigen::ArrayXd x = grid.xc.row(k).transpose().array() * k0;
    b.rho_f0 += spec.amp_rho_f / d * x.sin();
    b.rho0 += spec.amp_rho / d * x.cos();
    b.u_f0.row(k) = spec.amp_u_f * x.cos().transpose();
    b.u0.row(k) = spec.amp_u * x.sin().transpose();
  }
  return b;
}

LimitState to_limit_state(const BaseProfiles& b) {
  LimitState U;
  U.rho_f = b.rho_f0;
  U.omega = b.u_f0.rowwise() * b.rho_f0.transpose();
  U.rho = b.rho0;
  U.m = b.u0.rowwise() * b.rho0.transpose();
  return U;
}

BaseProfiles from_limit_state(const LimitState& U) {
  return {U.rho_f, U.u_f(), U.rho, U.u()};
}

double initial_temperature(double epsilon, ThetaRule rule) {
  return rule == ThetaRule::Sqrt ? std::sqrt(epsilon) : epsilon;
}

PreparedIC well_prepared_ic(const BaseProfiles& base, double epsilon, const PhaseGrid& grid,
                            double gamma, ThetaRule rule) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("initial data: epsilon must be > 0");
  const double mean = base.rho_f0.mean();
  if (std::abs(mean - 1.0) > kNeutralityTolerance) {
    std::ostringstream os;
    os << "initial data: particle density must have mean 1 (neutrality), got " << mean;
    throw std::invalid_argument(os.str());
  }
  if ((base.rho0 <= 0.0).any()) throw std::invalid_argument("initial data: fluid density must be > 0");
  if ((base.rho_f0 < 0.0).any()) throw std::invalid_argument("initial data: negative particle density");

  const int d = grid.dim;
  const double theta = initial_temperature(epsilon, rule);
  const double umax = base.u_f0.abs().maxCoeff();
  const double margin = 0.5 * grid.vmax - umax;
  if (margin <= 0.0)
    throw std::invalid_argument("initial data: max|u_f0| exceeds Vmax/2");
  const double tail = d * std::erfc(margin / std::sqrt(2.0 * theta));
  if (tail > kTailTolerance) {
    std::ostringstream os;
    os << "initial data: Gaussian mass beyond Vmax/2 is up to " << tail << " (limit "
       << kTailTolerance << "); increase Vmax";
    throw std::invalid_argument(os.str());
  }

  PreparedIC ic;
  ic.f = zero_distribution(grid);
  for (Index c = 0; c < grid.ncells(); ++c) {
    if (base.rho_f0(c) == 0.0) continue;
    const Eigen::ArrayXd r2 =
        (grid.vc.array().colwise() - base.u_f0.col(c)).square().colwise().sum().transpose();
    Eigen::ArrayXd g = (-r2 / (2.0 * theta)).exp();
    g *= base.rho_f0(c) / velocity_integral(grid, g);
    ic.f.data.col(c) = g.matrix();
  }
  ic.fluid.rho = base.rho0;
  ic.fluid.m = base.u0.rowwise() * base.rho0.transpose();
  ic.fluid.gamma = gamma;

  const LimitState U0 = to_limit_state(base);
  const double vol = grid.cell_volume();
  Certificate& cert = ic.cert;
  cert.theta = theta;
  cert.tail_bound = tail;
  cert.F0 = energy_functional(ic.f, ic.fluid);
  cert.H_rel0 = relative_entropy(moments(ic.f), ic.fluid, U0, grid).H_rel;
  const Field H0 = 0.5 * base.rho_f0 * base.u_f0.square().colwise().sum().transpose() +
                   0.5 * base.rho0 * base.u0.square().colwise().sum().transpose() +
                   base.rho0.pow(gamma) / (gamma - 1.0);
  cert.excess = cert.F0 - coulomb_energy(base.rho_f0, grid) - H0.sum() * vol;
  cert.thermal = 0.5 * d * theta * base.rho_f0.sum() * vol;
  return ic;
}

std::vector<double> report_times(double T, double cadence) {
  if (!(T >= 0.0)) throw std::invalid_argument("report_times: T must be >= 0");
  if (!(cadence > 0.0)) throw std::invalid_argument("report_times: cadence must be > 0");
  std::vector<double> out{0.0};
  if (T == 0.0) return out;
  for (long k = 1;; ++k) {
    const double t = static_cast<double>(k) * cadence;
    if (t >= T * (1.0 - 1e-12)) break;
    out.push_back(t);
  }
  out.push_back(T);
  return out;
}

Metrics convergence_metrics(const DistF& f, const FluidState& fluid, const LimitState& U,
                            const PhaseGrid& grid) {
  Metrics m;
  const double vol = grid.cell_volume();
  const Field drho = (fluid.rho - U.rho).abs();
  m.rho_L1 = drho.sum() * vol;
  m.rho_Lgamma = std::pow(drho.pow(fluid.gamma).sum() * vol, 1.0 / fluid.gamma);
  const Moments mom = moments(f);
  m.coulomb = coulomb_distance(mom.rho_f, U.rho_f, grid);
  m.momentum_L1 = (fluid.m - U.m).matrix().colwise().norm().sum() * vol;
  m.mono_stress = centred_second_moment(f, U.u_f()).sum() * vol;
  return m;
}

RunResult run_coupled(const PreparedIC& ic, const std::vector<LimitState>& limit_traj,
                      const RunOptions& opts) {
  const std::vector<double> times = report_times(opts.T_final, opts.report_cadence);
  if (limit_traj.size() != times.size())
    throw std::invalid_argument("run_coupled: limit trajectory does not match the report times");
  const PhaseGrid& grid = ic.f.grid;

  CoupledStepper s(ic.f, ic.fluid, opts.coupled);
  const double mass_p0 = ic.f.mass();
  const double mass_f0 = ic.fluid.rho.sum() * grid.cell_volume();
  const Eigen::VectorXd P0 = coupled_momentum_budget(ic.fluid, ic.f);

  RunResult out;
  out.epsilon = opts.coupled.epsilon;
  out.initial = convergence_metrics(ic.f, ic.fluid, limit_traj.front(), grid);
  out.traj.push_back(make_report(0.0, s, limit_traj.front(), mass_p0, mass_f0, P0));
  if (opts.on_report) opts.on_report(s, 0);

  for (std::size_t k = 1; k < times.size(); ++k) {
    const double span = times[k] - times[k - 1];
    const long n = std::max(1L, static_cast<long>(std::ceil(span / s.stable_dt() * (1.0 - 1e-12))));
    const double dt = span / static_cast<double>(n);
    for (long i = 0; i < n; ++i) s.step(dt);
    out.steps += n;
    out.traj.push_back(make_report(times[k], s, limit_traj[k], mass_p0, mass_f0, P0));
    if (opts.on_report) opts.on_report(s, static_cast<long>(k));
  }

  double drag_int = 0.0, visc_int = 0.0;
  for (std::size_t k = 0; k < out.traj.size(); ++k) {
    auto& r = out.traj[k];
    if (k > 0) {
      const auto& p = out.traj[k - 1];
      drag_int += 0.5 * (r.t - p.t) * (p.drag_rel + r.drag_rel);
      visc_int += 0.5 * (r.t - p.t) * (p.visc_rel + r.visc_rel);
      r.F += opts.energy_bump * out.traj.front().F;
    }
    r.drag_rel_int = drag_int;
    r.visc_rel_int = visc_int;
  }

  out.check = check_energy_inequality(out.traj, opts.coupled.epsilon, opts.tol_growth);
  out.f = s.f();
  out.fluid = s.fluid();
  out.budget = s.budget();
  out.final = convergence_metrics(out.f, out.fluid, limit_traj.back(), grid);
  return out;
}

std::vector<LimitState> limit_reference(const ProfileSpec& spec, const PhaseGrid& grid, int refine,
                                        const LimitOptions& opts, const std::vector<double>& times) {
  if (spec.kind == "file") refine = 1;
  if (refine <= 1) {
    const LimitState U0 = to_limit_state(sample_profile(spec, grid));
    return integrate_limit(U0, grid, opts, times);
  }
  const PhaseGrid fine = grid.refined(refine);
  const LimitState U0 = to_limit_state(sample_profile(spec, fine));
  std::vector<LimitState> traj = integrate_limit(U0, fine, opts, times);
  for (auto& U : traj) U = restrict_state(U, fine, refine);
  return traj;
}

LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::domain_error("fit_loglog: need at least two matching points");
  const std::size_t n = x.size();
  Eigen::ArrayXd lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::domain_error("fit_loglog: values must be positive");
    lx(i) = std::log(x[i]);
    ly(i) = std::log(y[i]);
  }
  const double mx = lx.mean(), my = ly.mean();
  const double sxx = (lx - mx).square().sum();
  const double sxy = ((lx - mx) * (ly - my)).sum();
  const double syy = (ly - my).square().sum();
  if (sxx == 0.0) throw std::domain_error("fit_loglog: x values must be distinct");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double ssr = (ly - (f.intercept + f.slope * lx)).square().sum();
  f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

int count_inversions(const std::vector<double>& y, double rel) {
  int n = 0;
  for (std::size_t i = 1; i < y.size(); ++i)
    if (y[i] > y[i - 1] * (1.0 + rel)) ++n;
  return n;
}

namespace {

LinearFit try_fit(const std::vector<double>& x, const std::vector<double>& y) {
  try {
    return fit_loglog(x, y);
  } catch (const std::domain_error&) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan};
  }
}

nlohmann::ordered_json fit_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
}

void persist(const SweepResult& r, const std::filesystem::path& dir) {
  if (dir.empty()) return;
  for (const auto& run : r.runs)
    write_entropy_csv(dir / ("entropy_" + eps_tag(run.epsilon) + ".csv"), run.traj);
  write_text(dir / "sweep_summary.json", sweep_summary_json(r));
}

}  // namespace

std::string sweep_summary_json(const SweepResult& r) {
  nlohmann::ordered_json j;
  j["epsilons"] = r.epsilons;
  j["H_final"] = r.H_final;
  j["bound_final"] = r.bound_final;
  j["stress_int"] = r.stress_int;
  j["mono_initial"] = r.mono_initial;
  j["mono_final"] = r.mono_final;
  nlohmann::ordered_json certs = nlohmann::ordered_json::array();
  for (const auto& c : r.certificates)
    certs.push_back({{"F0", c.F0}, {"H_rel0", c.H_rel0}, {"excess", c.excess},
                     {"thermal", c.thermal}, {"theta", c.theta}, {"tail_bound", c.tail_bound}});
  j["certificates"] = certs;
  nlohmann::ordered_json energy = nlohmann::ordered_json::array();
  for (const auto& e : r.energy)
    energy.push_back({{"pass", e.pass}, {"margin", e.margin}, {"violation", e.violation},
                      {"worst_t", e.worst_t}, {"C_fit", e.C_fit}});
  j["energy"] = energy;
  j["fit_H"] = fit_json(r.fit_H);
  j["fit_bound"] = fit_json(r.fit_bound);
  j["fit_stress"] = fit_json(r.fit_stress);
  j["fit_cert_H"] = fit_json(r.fit_cert_H);
  j["fit_cert_excess"] = fit_json(r.fit_cert_excess);
  j["slope_H"] = r.fit_bound.slope;
  j["slope_stress"] = r.fit_stress.slope;
  j["fitted_C"] = r.fitted_C;
  j["fitted_C_stress"] = r.fitted_C_stress;
  j["bound_inversions"] = r.bound_inversions;
  j["mono_inversions"] = r.mono_inversions;
  j["pass"] = {{"energy", r.energy_pass},
               {"rate", r.rate_pass},
               {"stress", r.stress_pass},
               {"monokinetic", r.mono_pass}};
  return j.dump(2) + "\n";
}

SweepResult eps_sweep(const std::vector<double>& epsilons, const PhaseGrid& grid,
                      const SweepOptions& opts) {
  const std::set<double> distinct(epsilons.begin(), epsilons.end());
  if (distinct.size() != epsilons.size()) throw std::invalid_argument("sweep: duplicate epsilon values");
  if (distinct.size() < 3) throw std::invalid_argument("sweep: need >= 3 distinct epsilon values");
  for (double e : distinct)
    if (!(e > 0.0)) throw std::invalid_argument("sweep: epsilon values must be positive");
  if (*distinct.rbegin() / *distinct.begin() < 100.0 * (1.0 - 1e-12))
    throw std::invalid_argument("sweep: epsilon values must span at least two decades");

  SweepResult r;
  r.epsilons.assign(distinct.rbegin(), distinct.rend());
  const std::size_t n = r.epsilons.size();

  const std::vector<double> times = report_times(opts.run.T_final, opts.run.report_cadence);
  const std::vector<LimitState> ref =
      limit_reference(opts.profile, grid, opts.limit_refine, opts.limit, times);
  const BaseProfiles base = from_limit_state(ref.front());

  std::vector<RunResult> runs(n);
  std::vector<Certificate> certs(n);
  std::vector<std::exception_ptr> errors(n);
  auto job = [&](std::size_t i) {
    try {
      const PreparedIC ic = well_prepared_ic(base, r.epsilons[i], grid, opts.gamma, opts.theta_rule);
      certs[i] = ic.cert;
      RunOptions ro = opts.run;
      ro.coupled.epsilon = r.epsilons[i];
      runs[i] = run_coupled(ic, ref, ro);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const int workers = std::min<int>(std::max(opts.threads, 1), static_cast<int>(n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) job(i);
      });
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < n; ++i)
    if (errors[i]) {
      SweepResult partial;
      for (std::size_t j = 0; j < n; ++j)
        if (!errors[j]) {
          partial.epsilons.push_back(r.epsilons[j]);
          partial.runs.push_back(std::move(runs[j]));
        }
      persist(partial, opts.output_dir);
      std::rethrow_exception(errors[i]);
    }

  r.runs = std::move(runs);
  r.certificates = certs;
  r.energy_pass = true;
  for (const auto& run : r.runs) {
    const EntropyReport& last = run.traj.back();
    r.H_final.push_back(last.H_rel + last.coulomb_rel);
    r.bound_final.push_back(last.bound_lhs());
    r.stress_int.push_back(last.stress_int);
    r.mono_initial.push_back(run.initial.mono_stress);
    r.mono_final.push_back(run.final.mono_stress);
    r.energy.push_back(run.check);
    r.energy_pass = r.energy_pass && run.check.pass;
  }
  std::vector<double> cert_H, cert_excess;
  for (const auto& c : certs) {
    cert_H.push_back(c.H_rel0);
    cert_excess.push_back(c.excess);
  }
  r.fit_H = try_fit(r.epsilons, r.H_final);
  r.fit_bound = try_fit(r.epsilons, r.bound_final);
  r.fit_stress = try_fit(r.epsilons, r.stress_int);
  r.fit_cert_H = try_fit(r.epsilons, cert_H);
  r.fit_cert_excess = try_fit(r.epsilons, cert_excess);
  for (std::size_t i = 0; i < n; ++i) {
    r.fitted_C = std::max(r.fitted_C, r.bound_final[i] / std::sqrt(r.epsilons[i]));
    r.fitted_C_stress = std::max(r.fitted_C_stress, r.stress_int[i] / r.epsilons[i]);
  }
  r.bound_inversions = count_inversions(r.bound_final);
  r.mono_inversions = count_inversions(r.mono_final);
  r.rate_pass = r.fit_bound.slope >= 0.4 && r.fit_bound.r2 >= 0.9;
  r.stress_pass = r.fit_stress.slope >= 0.8;
  r.mono_pass = r.mono_inversions == 0 && r.mono_final.back() <= 0.1 * r.mono_initial.back();
  persist(r, opts.output_dir);
  return r;
}

PhaseGrid grid_from(const RunConfig& cfg) { return make_grid(cfg.dim, cfg.L, cfg.Nx, cfg.Vmax, cfg.Nv); }

ProfileSpec profile_from(const RunConfig& cfg) {
  return {cfg.ic_profile, cfg.amp_rho_f, cfg.amp_u_f, cfg.amp_rho, cfg.amp_u, cfg.ic_file};
}

RunOptions run_options_from(const RunConfig& cfg, double epsilon) {
  RunOptions o;
  o.T_final = cfg.T_final;
  o.report_cadence = cfg.report_cadence;
  o.coupled.epsilon = epsilon;
  o.coupled.cfl = cfg.cfl;
  o.coupled.transport =
      cfg.transport_scheme == "sl" ? TransportScheme::SemiLagrangian : TransportScheme::FiniteVolume;
  o.coupled.fluid.viscous =
      cfg.viscous_scheme == "explicit" ? ViscousScheme::Explicit : ViscousScheme::Implicit;
  o.coupled.alignment = cfg.alignment;
  o.tol_growth = cfg.tol_growth;
  o.energy_bump = cfg.inject_energy_bump;
  return o;
}

SweepOptions sweep_options_from(const RunConfig& cfg) {
  SweepOptions o;
  o.profile = profile_from(cfg);
  o.gamma = cfg.gamma;
  o.theta_rule = cfg.theta_rule;
  o.limit_refine = cfg.limit_refine;
  o.limit.gamma = cfg.gamma;
  o.limit.hyperviscosity = cfg.hyperviscosity;
  o.run = run_options_from(cfg, cfg.epsilon);
  o.threads = threads_from_env();
  o.output_dir = cfg.output_dir;
  return o;
}

int threads_from_env() {
  const char* v = std::getenv("ENTROLIMIT_THREADS");
  if (!v) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n < 0) return 0;
  return static_cast<int>(std::min(n, 256L));
}

}  // namespace entrolimit
