#include "entrolimit/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "entrolimit/io.hpp"

namespace entrolimit {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string one_of(const std::string& key, const std::string& v,
                   std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return v;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : "|") + a;
  throw ConfigError(key + ": expected one of " + list + ", got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"mode", [](RunConfig& c, const std::string& v) { c.mode = one_of("mode", v, {"run", "limit", "sweep", "check"}); }},
      {"dim", [](RunConfig& c, const std::string& v) { c.dim = to_int("dim", v); }},
      {"L", [](RunConfig& c, const std::string& v) { c.L = to_double("L", v); }},
      {"Nx", [](RunConfig& c, const std::string& v) { c.Nx = to_int("Nx", v); }},
      {"Vmax", [](RunConfig& c, const std::string& v) { c.Vmax = to_double("Vmax", v); }},
      {"Nv", [](RunConfig& c, const std::string& v) { c.Nv = to_int("Nv", v); }},
      {"gamma", [](RunConfig& c, const std::string& v) { c.gamma = to_double("gamma", v); }},
      {"epsilon", [](RunConfig& c, const std::string& v) { c.epsilon = to_double("epsilon", v); }},
      {"epsilons", [](RunConfig& c, const std::string& v) { c.epsilons = to_list("epsilons", v); }},
      {"ic.profile", [](RunConfig& c, const std::string& v) { c.ic_profile = one_of("ic.profile", v, {"canonical", "file"}); }},
      {"ic.amp_rho_f", [](RunConfig& c, const std::string& v) { c.amp_rho_f = to_double("ic.amp_rho_f", v); }},
      {"ic.amp_u_f", [](RunConfig& c, const std::string& v) { c.amp_u_f = to_double("ic.amp_u_f", v); }},
      {"ic.amp_rho", [](RunConfig& c, const std::string& v) { c.amp_rho = to_double("ic.amp_rho", v); }},
      {"ic.amp_u", [](RunConfig& c, const std::string& v) { c.amp_u = to_double("ic.amp_u", v); }},
      {"ic.file", [](RunConfig& c, const std::string& v) { c.ic_file = v; }},
      {"T_final", [](RunConfig& c, const std::string& v) { c.T_final = to_double("T_final", v); }},
      {"cfl", [](RunConfig& c, const std::string& v) { c.cfl = to_double("cfl", v); }},
      {"report_cadence", [](RunConfig& c, const std::string& v) { c.report_cadence = to_double("report_cadence", v); }},
      {"transport_scheme", [](RunConfig& c, const std::string& v) { c.transport_scheme = one_of("transport_scheme", v, {"fv", "sl"}); }},
      {"theta_rule", [](RunConfig& c, const std::string& v) {
         c.theta_rule = one_of("theta_rule", v, {"sqrt", "linear"}) == "sqrt" ? ThetaRule::Sqrt : ThetaRule::Linear;
       }},
      {"hyperviscosity", [](RunConfig& c, const std::string& v) { c.hyperviscosity = to_double("hyperviscosity", v); }},
      {"viscous_scheme", [](RunConfig& c, const std::string& v) { c.viscous_scheme = one_of("viscous_scheme", v, {"implicit", "explicit"}); }},
      {"limit_refine", [](RunConfig& c, const std::string& v) { c.limit_refine = to_int("limit_refine", v); }},
      {"alignment", [](RunConfig& c, const std::string& v) { c.alignment = to_bool("alignment", v); }},
      {"output.dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
      {"output.snapshots", [](RunConfig& c, const std::string& v) { c.output_snapshots = to_bool("output.snapshots", v); }},
      {"check.tol_growth", [](RunConfig& c, const std::string& v) { c.tol_growth = to_double("check.tol_growth", v); }},
      {"check.energy", [](RunConfig& c, const std::string& v) { c.check_energy = to_bool("check.energy", v); }},
      {"check.rates", [](RunConfig& c, const std::string& v) { c.check_rates = to_bool("check.rates", v); }},
      {"check.inject_energy_bump", [](RunConfig& c, const std::string& v) { c.inject_energy_bump = to_double("check.inject_energy_bump", v); }},
      {"poincare.cbar", [](RunConfig& c, const std::string& v) { c.poincare_cbar = to_double("poincare.cbar", v); }},
  };
  return table;
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown key '" + key + "'");
  it->second(cfg, value);
}

}  // namespace

void validate(const RunConfig& c) {
  if (!(c.gamma > 1.5))
    throw ConfigError("gamma must exceed 3/2 (the convergence result assumes gamma > 3/2), got " +
                      format_double(c.gamma));
  if (c.dim < 1 || c.dim > 3) throw ConfigError("dim must be 1, 2 or 3");
  if (!(c.L > 0.0)) throw ConfigError("L must be positive");
  if (c.Nx < 4) throw ConfigError("Nx must be >= 4");
  if (c.Nv < 4 || c.Nv % 2 != 0) throw ConfigError("Nv must be an even integer >= 4");
  if (!(c.Vmax > 0.0)) throw ConfigError("Vmax must be positive");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (!(c.T_final >= 0.0)) throw ConfigError("T_final must be >= 0");
  if (!(c.report_cadence > 0.0)) throw ConfigError("report_cadence must be positive");
  if (!(c.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  for (double e : c.epsilons)
    if (!(e > 0.0)) throw ConfigError("epsilons must all be positive");
  if (!(c.hyperviscosity >= 0.0)) throw ConfigError("hyperviscosity must be >= 0");
  if (c.limit_refine < 1) throw ConfigError("limit_refine must be >= 1");
  if (!(c.tol_growth >= 0.0)) throw ConfigError("check.tol_growth must be >= 0");
  if (!(c.poincare_cbar > 0.0)) throw ConfigError("poincare.cbar must be positive");
  if (c.ic_profile == "file" && c.ic_file.empty()) throw ConfigError("ic.profile = file needs ic.file");
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  assign(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(ss, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where + "expected 'key = value'", lineno);
    try {
      assign(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what(), lineno);
    }
  }
  validate(cfg);
  return cfg;
}

std::string echo(const RunConfig& c) {
  std::ostringstream os;
  auto b = [](bool v) { return v ? "true" : "false"; };
  std::string eps;
  for (double e : c.epsilons) eps += (eps.empty() ? "" : ",") + format_double(e);
  os << "mode = " << c.mode << '\n'
     << "dim = " << c.dim << '\n'
     << "L = " << format_double(c.L) << '\n'
     << "Nx = " << c.Nx << '\n'
     << "Vmax = " << format_double(c.Vmax) << '\n'
     << "Nv = " << c.Nv << '\n'
     << "gamma = " << format_double(c.gamma) << '\n'
     << "epsilon = " << format_double(c.epsilon) << '\n'
     << "epsilons = " << eps << '\n'
     << "ic.profile = " << c.ic_profile << '\n'
     << "ic.amp_rho_f = " << format_double(c.amp_rho_f) << '\n'
     << "ic.amp_u_f = " << format_double(c.amp_u_f) << '\n'
     << "ic.amp_rho = " << format_double(c.amp_rho) << '\n'
     << "ic.amp_u = " << format_double(c.amp_u) << '\n';
  if (!c.ic_file.empty()) os << "ic.file = " << c.ic_file << '\n';
  os << "T_final = " << format_double(c.T_final) << '\n'
     << "cfl = " << format_double(c.cfl) << '\n'
     << "report_cadence = " << format_double(c.report_cadence) << '\n'
     << "transport_scheme = " << c.transport_scheme << '\n'
     << "theta_rule = " << (c.theta_rule == ThetaRule::Sqrt ? "sqrt" : "linear") << '\n'
     << "hyperviscosity = " << format_double(c.hyperviscosity) << '\n'
     << "viscous_scheme = " << c.viscous_scheme << '\n'
     << "limit_refine = " << c.limit_refine << '\n'
     << "alignment = " << b(c.alignment) << '\n'
     << "output.dir = " << c.output_dir << '\n'
     << "output.snapshots = " << b(c.output_snapshots) << '\n'
     << "check.tol_growth = " << format_double(c.tol_growth) << '\n'
     << "check.energy = " << b(c.check_energy) << '\n'
     << "check.rates = " << b(c.check_rates) << '\n'
     << "check.inject_energy_bump = " << format_double(c.inject_energy_bump) << '\n'
     << "poincare.cbar = " << format_double(c.poincare_cbar) << '\n';
  return os.str();
}

}  // namespace entrolimit
