#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace entrolimit {

/// Bad configuration text or values. line() is 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class ThetaRule { Sqrt, Linear };

struct RunConfig {
  std::string mode = "run";  ///< run | limit | sweep | check

  int dim = 1;
  double L = 1.0;
  int Nx = 128;
  double Vmax = 6.0;
  int Nv = 128;

  double gamma = 2.0;
  double epsilon = 1e-2;
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3, 1e-4};

  std::string ic_profile = "canonical";  ///< canonical | file
  double amp_rho_f = 0.2;
  double amp_u_f = 0.2;
  double amp_rho = 0.2;
  double amp_u = 0.1;
  std::string ic_file;

  double T_final = 0.5;
  double cfl = 0.5;
  double report_cadence = 0.05;

  std::string transport_scheme = "fv";  ///< fv | sl
  ThetaRule theta_rule = ThetaRule::Sqrt;
  double hyperviscosity = 0.0;
  std::string viscous_scheme = "implicit";  ///< implicit | explicit
  int limit_refine = 2;
  bool alignment = true;

  std::string output_dir = "out";
  bool output_snapshots = false;

  double tol_growth = 1e-3;
  bool check_energy = true;
  bool check_rates = false;
  double inject_energy_bump = 0.0;  ///< relative bump added to F for t > 0 (fault injection)
  double poincare_cbar = 10.0;

  bool operator==(const RunConfig&) const = default;
};

/// Parses flat `key = value` text with `#` comments. Unknown keys, malformed
/// lines and invalid values throw ConfigError.
RunConfig parse_config(const std::string& text);

/// Applies one `key=value` override on top of an existing config.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Checks cross-field invariants. Throws ConfigError.
void validate(const RunConfig& cfg);

/// Full effective config in the same format; parse_config(echo(c)) == c.
std::string echo(const RunConfig& cfg);

}  // namespace entrolimit
