#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entrolimit/config.hpp"
#include "entrolimit/harness.hpp"
#include "entrolimit/io.hpp"

namespace fs = std::filesystem;
using namespace entrolimit;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

RunConfig load(const std::string& path, const std::vector<std::string>& overrides,
               const std::string& mode) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
  RunConfig cfg = parse_config(read_text(path));
  for (const auto& o : overrides) apply_override(cfg, o);
  cfg.mode = mode;
  validate(cfg);
  return cfg;
}

std::string snapshot_name(long index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "f_%05ld.bin", index);
  return buf;
}

int run_single(const RunConfig& cfg, bool force_check) {
  const fs::path dir = cfg.output_dir;
  write_text(dir / "config.echo", echo(cfg));
  const PhaseGrid grid = grid_from(cfg);
  LimitOptions lo{cfg.gamma, cfg.hyperviscosity};
  const auto times = report_times(cfg.T_final, cfg.report_cadence);
  const auto ref = limit_reference(profile_from(cfg), grid, cfg.limit_refine, lo, times);
  const PreparedIC ic =
      well_prepared_ic(from_limit_state(ref.front()), cfg.epsilon, grid, cfg.gamma, cfg.theta_rule);
  RunOptions ro = run_options_from(cfg, cfg.epsilon);
  if (cfg.output_snapshots)
    ro.on_report = [&](const CoupledStepper& s, long k) { write_snapshot(dir / snapshot_name(k), s.f()); };
  const RunResult res = run_coupled(ic, ref, ro);

  const fs::path csv = dir / ("entropy_" + format_double(cfg.epsilon) + ".csv");
  write_entropy_csv(csv, res.traj);
  write_fluid_csv(dir / "fluid_final.csv", grid, res.fluid);
  write_limit_csv(dir / "limit_final.csv", grid, ref.back(), cfg.gamma);

  const bool checked = force_check || cfg.check_energy;
  const bool ok = !checked || res.check.pass;
  const auto& last = res.traj.back();
  std::cout << (ok ? "ok" : "FAILED") << ": eps=" << format_double(cfg.epsilon)
            << " T=" << format_double(last.t) << " steps=" << res.steps
            << " H_rel=" << format_double(last.H_rel)
            << " energy_violation=" << format_double(res.check.violation)
            << " C_fit=" << format_double(res.check.C_fit) << '\n'
            << "  " << (dir / "config.echo").string() << '\n'
            << "  " << csv.string() << '\n'
            << "  " << (dir / "fluid_final.csv").string() << '\n'
            << "  " << (dir / "limit_final.csv").string() << '\n';
  return ok ? kOk : kCheckFailed;
}

int run_limit(const RunConfig& cfg) {
  const fs::path dir = cfg.output_dir;
  write_text(dir / "config.echo", echo(cfg));
  const PhaseGrid grid = grid_from(cfg);
  LimitOptions lo{cfg.gamma, cfg.hyperviscosity};
  const auto times = report_times(cfg.T_final, cfg.report_cadence);
  const auto ref = limit_reference(profile_from(cfg), grid, cfg.limit_refine, lo, times);
  std::cout << "ok: limit run to T=" << format_double(cfg.T_final) << '\n'
            << "  " << (dir / "config.echo").string() << '\n';
  for (std::size_t k = 0; k < ref.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "limit_%05zu.csv", k);
    write_limit_csv(dir / name, grid, ref[k], cfg.gamma);
    std::cout << "  " << (dir / name).string() << '\n';
  }
  return kOk;
}

int run_sweep(const RunConfig& cfg) {
  const fs::path dir = cfg.output_dir;
  write_text(dir / "config.echo", echo(cfg));
  const SweepResult r = eps_sweep(cfg.epsilons, grid_from(cfg), sweep_options_from(cfg));
  bool ok = true;
  if (cfg.check_energy) ok = ok && r.energy_pass;
  if (cfg.check_rates) ok = ok && r.rate_pass && r.stress_pass && r.mono_pass;
  std::cout << (ok ? "ok" : "FAILED") << ": sweep over " << r.epsilons.size()
            << " epsilons, slope_H=" << format_double(r.fit_bound.slope)
            << " r2=" << format_double(r.fit_bound.r2)
            << " slope_stress=" << format_double(r.fit_stress.slope)
            << " energy=" << (r.energy_pass ? "pass" : "fail") << '\n'
            << "  " << (dir / "config.echo").string() << '\n'
            << "  " << (dir / "sweep_summary.json").string() << '\n';
  for (double e : r.epsilons)
    std::cout << "  " << (dir / ("entropy_" + format_double(e) + ".csv")).string() << '\n';
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic-fluid hydrodynamic limit solver"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  for (const char* name : {"run", "limit", "sweep", "check"}) {
    auto* sub = app.add_subcommand(name, std::string(name) + " workflow");
    sub->add_option("--config", config_path, "flat key = value config file")->required();
    sub->add_option("--set", overrides, "override as key=value (repeatable)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  const std::string mode = app.get_subcommands().front()->get_name();
  RunConfig cfg;
  try {
    cfg = load(config_path, overrides, mode);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (mode == "run") return run_single(cfg, false);
    if (mode == "check") return run_single(cfg, true);
    if (mode == "limit") return run_limit(cfg);
    return run_sweep(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid setup: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kCheckFailed;
  }
}
