#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "entrolimit/config.hpp"
#include "entrolimit/coupled.hpp"
#include "entrolimit/entropy.hpp"
#include "entrolimit/limit.hpp"

namespace entrolimit {

/// Smooth initial profiles. The canonical one is
///   rho_f0 = 1 + a_f sin(2 pi x / L),  u_f0 = b_f cos(2 pi x / L),
///   rho0   = 1 + a   cos(2 pi x / L),  u0   = b   sin(2 pi x / L),
/// with the scalar modes averaged over the axes and vector component k using x_k.
/// A file profile lists one cell per line: rho_f, u_f (d values), rho, u (d values).
struct ProfileSpec {
  std::string kind = "canonical";
  double amp_rho_f = 0.2;
  double amp_u_f = 0.2;
  double amp_rho = 0.2;
  double amp_u = 0.1;
  std::string file;
};

struct BaseProfiles {
  Field rho_f0;
  VectorField u_f0;
  Field rho0;
  VectorField u0;
};

BaseProfiles sample_profile(const ProfileSpec& spec, const PhaseGrid& grid);
LimitState to_limit_state(const BaseProfiles& base);
BaseProfiles from_limit_state(const LimitState& U);

/// Initial temperature sqrt(eps) or eps.
double initial_temperature(double epsilon, ThetaRule rule);

/// Left-hand sides of the preparation assumptions for one epsilon.
struct Certificate {
  double F0 = 0.0;          ///< total energy of the prepared data
  double H_rel0 = 0.0;      ///< relative entropy against the limit data
  double excess = 0.0;      ///< F0 - field energy - int H(U0)
  double thermal = 0.0;     ///< (d/2) theta int rho_f0
  double theta = 0.0;
  double tail_bound = 0.0;  ///< Gaussian mass bound beyond Vmax/2
};

struct PreparedIC {
  DistF f;
  FluidState fluid;
  Certificate cert;
};

/// Maxwellian particles with mean u_f0 and temperature theta(eps), normalised
/// per cell to rho_f0, and the fluid at (rho0, rho0 u0). Throws
/// std::invalid_argument when |mean(rho_f0) - 1| > 1e-10, when max|u_f0|
/// exceeds Vmax/2, or when the Gaussian tail beyond Vmax/2 exceeds 1e-12.
PreparedIC well_prepared_ic(const BaseProfiles& base, double epsilon, const PhaseGrid& grid,
                            double gamma, ThetaRule rule = ThetaRule::Sqrt);

/// 0, cadence, 2 cadence, ..., T with T always last.
std::vector<double> report_times(double T, double cadence);

struct Metrics {
  double rho_L1 = 0.0;
  double rho_Lgamma = 0.0;
  double coulomb = 0.0;        ///< int |grad K * (rho_f^eps - rho_f)|^2
  double momentum_L1 = 0.0;    ///< int |rho^eps u^eps - rho u|
  double mono_stress = 0.0;    ///< int int |xi - u_f|^2 f^eps with the limit u_f
};

Metrics convergence_metrics(const DistF& f, const FluidState& fluid, const LimitState& U,
                            const PhaseGrid& grid);

struct RunOptions {
  double T_final = 0.5;
  double report_cadence = 0.05;
  CoupledOptions coupled{};
  double tol_growth = 1e-3;
  double energy_bump = 0.0;  ///< fault injection: F += bump F(0) for t > 0
  std::function<void(const CoupledStepper&, long report_index)> on_report;
};

struct RunResult {
  double epsilon = 0.0;
  std::vector<EntropyReport> traj;
  EnergyCheck check;
  DistF f;
  FluidState fluid;
  CoupledBudget budget;
  long steps = 0;
  Metrics initial;
  Metrics final;
};

/// Advances the coupled system and reports at report_times(T, cadence). The
/// limit trajectory must hold the limit state at each of those times.
RunResult run_coupled(const PreparedIC& ic, const std::vector<LimitState>& limit_traj,
                      const RunOptions& opts);

/// Limit reference at the report times, integrated on grid.refined(refine)
/// from the sampled profile and averaged back onto grid.
std::vector<LimitState> limit_reference(const ProfileSpec& spec, const PhaseGrid& grid, int refine,
                                        const LimitOptions& opts, const std::vector<double>& times);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of log y on log x. Throws std::domain_error on fewer than two
/// points or non-positive values.
LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Number of adjacent pairs (in decreasing eps) where y grows by more than rel.
int count_inversions(const std::vector<double>& y, double rel = 0.05);

struct SweepOptions {
  ProfileSpec profile{};
  double gamma = 2.0;
  ThetaRule theta_rule = ThetaRule::Sqrt;
  int limit_refine = 2;
  LimitOptions limit{};
  RunOptions run{};
  int threads = 0;  ///< 0 or 1 runs serially
  std::filesystem::path output_dir;  ///< empty: nothing written
};

struct SweepResult {
  std::vector<double> epsilons;       ///< strictly decreasing
  std::vector<double> H_final;        ///< H_rel + coulomb_rel at T
  std::vector<double> bound_final;    ///< H_final + drag and viscous time integrals
  std::vector<double> stress_int;
  std::vector<double> mono_initial;
  std::vector<double> mono_final;
  std::vector<Certificate> certificates;
  std::vector<EnergyCheck> energy;
  std::vector<RunResult> runs;

  LinearFit fit_H;
  LinearFit fit_bound;
  LinearFit fit_stress;
  LinearFit fit_cert_H;
  LinearFit fit_cert_excess;
  double fitted_C = 0.0;         ///< max bound_final / sqrt(eps)
  double fitted_C_stress = 0.0;  ///< max stress_int / eps
  int bound_inversions = 0;
  int mono_inversions = 0;

  bool energy_pass = false;
  bool rate_pass = false;    ///< fit_bound slope >= 0.4 and r2 >= 0.9
  bool stress_pass = false;  ///< fit_stress slope >= 0.8
  bool mono_pass = false;    ///< monotone and final <= initial / 10 at the smallest eps
};

/// Runs every epsilon against one shared limit reference. Needs at least three
/// distinct values spanning two decades. Writes entropy_<eps>.csv and
/// sweep_summary.json to output_dir when set, including partial results when a
/// run fails (the error is then rethrown).
SweepResult eps_sweep(const std::vector<double>& epsilons, const PhaseGrid& grid,
                      const SweepOptions& opts);

std::string sweep_summary_json(const SweepResult& r);

/// Options assembled from a validated config.
PhaseGrid grid_from(const RunConfig& cfg);
ProfileSpec profile_from(const RunConfig& cfg);
RunOptions run_options_from(const RunConfig& cfg, double epsilon);
SweepOptions sweep_options_from(const RunConfig& cfg);

/// Thread cap from ENTROLIMIT_THREADS, 0 when unset or invalid.
int threads_from_env();

}  // namespace entrolimit
