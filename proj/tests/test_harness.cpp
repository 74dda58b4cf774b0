#include <doctest.h>

#include <cmath>

#include "entrolimit/harness.hpp"
#include "oracles.hpp"

using namespace entrolimit;

namespace {

BaseProfiles flat(const PhaseGrid& g, double rho_f, double u_f, double rho, double u) {
  BaseProfiles b;
  b.rho_f0 = Field::Constant(g.ncells(), rho_f);
  b.u_f0 = VectorField::Constant(g.dim, g.ncells(), u_f);
  b.rho0 = Field::Constant(g.ncells(), rho);
  b.u0 = VectorField::Constant(g.dim, g.ncells(), u);
  return b;
}

double max_diff(const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b) { return (a - b).abs().maxCoeff(); }

}  // namespace

TEST_CASE("well-prepared data certificate") {
  for (int d : {1, 2}) {
    const PhaseGrid g = d == 1 ? make_grid(1, 2.0, 16, 12.0, 512) : make_grid(2, 1.0, 4, 12.0, 256);
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      const PreparedIC ic = well_prepared_ic(flat(g, 1.0, 0.3, 1.0, 0.3), eps, g, 2.0);
      const double expected = 0.5 * d * std::sqrt(eps) * g.domain_volume();
      CHECK(ic.cert.theta == doctest::Approx(std::sqrt(eps)).epsilon(1e-15));
      CHECK(std::abs(ic.cert.excess - expected) / expected < 1e-8);
      CHECK(ic.cert.thermal == doctest::Approx(expected).epsilon(1e-12));
      CHECK(ic.cert.H_rel0 < 1e-20);
      CHECK(ic.cert.tail_bound < 1e-12);
      CHECK(std::abs(ic.f.mass() - g.domain_volume()) < 1e-12);
    }
  }
  const PhaseGrid g = make_grid(1, 1.0, 16, 6.0, 256);
  CHECK(well_prepared_ic(flat(g, 1.0, 0.0, 1.0, 0.0), 1e-2, g, 2.0, ThetaRule::Linear).cert.theta == 1e-2);
}

TEST_CASE("well-prepared data preconditions") {
  const PhaseGrid g = make_grid(1, 1.0, 16, 6.0, 128);
  CHECK_THROWS_AS(well_prepared_ic(flat(g, 1.1, 0.0, 1.0, 0.0), 1e-2, g, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(well_prepared_ic(flat(g, 1.0, 3.5, 1.0, 0.0), 1e-2, g, 2.0), std::invalid_argument);
  // theta = sqrt(0.1) leaves too much Gaussian mass beyond Vmax/2 = 3 for u_f0 = 1.
  CHECK_THROWS_AS(well_prepared_ic(flat(g, 1.0, 1.0, 1.0, 0.0), 1e-1, g, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(well_prepared_ic(flat(g, 1.0, 0.0, 0.0, 0.0), 1e-2, g, 2.0), std::invalid_argument);
}

TEST_CASE("property: certificates scale like sqrt(eps)") {
  const PhaseGrid g = make_grid(1, 1.0, 32, 12.0, 512);
  const BaseProfiles base = sample_profile({}, g);
  std::vector<double> eps{1e-1, 1e-2, 1e-3}, excess;
  for (double e : eps) excess.push_back(well_prepared_ic(base, e, g, 2.0).cert.excess);
  CHECK(fit_loglog(eps, excess).slope >= 0.45);
}

TEST_CASE("report times") {
  CHECK(report_times(0.0, 0.1) == std::vector<double>{0.0});
  const auto t = report_times(0.5, 0.2);
  REQUIRE(t.size() == 4);
  CHECK(t[1] == 0.2);
  CHECK(t[3] == 0.5);
  CHECK(report_times(0.3, 0.1).size() == 4);
  CHECK_THROWS_AS(report_times(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(report_times(-1.0, 0.1), std::invalid_argument);
}

TEST_CASE("run with zero final time emits the certificate") {
  const PhaseGrid g = make_grid(1, 1.0, 16, 6.0, 128);
  const ProfileSpec spec;
  const PreparedIC ic = well_prepared_ic(sample_profile(spec, g), 1e-2, g, 2.0);
  RunOptions o;
  o.T_final = 0.0;
  o.coupled.epsilon = 1e-2;
  const RunResult r = run_coupled(ic, limit_reference(spec, g, 1, {}, {0.0}), o);
  REQUIRE(r.traj.size() == 1);
  CHECK(r.steps == 0);
  CHECK(r.traj[0].H_rel == doctest::Approx(ic.cert.H_rel0));
  CHECK(r.traj[0].F == doctest::Approx(ic.cert.F0).epsilon(1e-14));
  CHECK(r.check.pass);
  CHECK_THROWS_AS(run_coupled(ic, {}, o), std::invalid_argument);
}

TEST_CASE("very large eps matches a run without alignment") {
  // Cool, well-resolved particles and a short horizon keep the O(T^2 theta / eps)
  // footprint of the alignment on the moments below the tolerance.
  const PhaseGrid g = make_grid(1, 1.0, 32, 4.0, 2048);
  ProfileSpec spec;
  spec.amp_u = spec.amp_u_f = 0.0;
  BaseProfiles base = sample_profile(spec, g);
  const PreparedIC ic = well_prepared_ic(base, 1e-3, g, 2.0, ThetaRule::Linear);
  RunOptions o;
  o.T_final = 0.05;
  o.report_cadence = 0.025;
  o.coupled.epsilon = 1e3;
  const auto ref = limit_reference(spec, g, 1, {}, report_times(o.T_final, o.report_cadence));
  const RunResult on = run_coupled(ic, ref, o);
  o.coupled.alignment = false;
  const RunResult off = run_coupled(ic, ref, o);
  const Moments a = moments(on.f), b = moments(off.f);
  CHECK(max_diff(a.rho_f, b.rho_f) < 1e-8);
  CHECK(max_diff(a.j_f, b.j_f) < 1e-8);
  CHECK(max_diff(on.fluid.rho, off.fluid.rho) < 1e-8);
  CHECK(max_diff(on.fluid.m, off.fluid.m) < 1e-8);
  for (std::size_t k = 0; k < on.traj.size(); ++k)
    CHECK(std::abs(on.traj[k].H_rel - off.traj[k].H_rel) < 1e-8);
}

TEST_CASE("small eps contracts the kinetic stress") {
  const PhaseGrid g = make_grid(1, 1.0, 32, 6.0, 128);
  const ProfileSpec spec;
  const double eps = 1e-3;
  const PreparedIC ic = well_prepared_ic(sample_profile(spec, g), eps, g, 2.0);
  RunOptions o;
  o.T_final = 0.5;
  o.report_cadence = 0.25;
  o.coupled.epsilon = eps;
  const RunResult r = run_coupled(ic, limit_reference(spec, g, 1, {}, report_times(0.5, 0.25)), o);
  CHECK(r.traj.back().stress_l1 < std::exp(-1.0) * r.traj.front().stress_l1);
  CHECK(r.check.pass);
  // The credited alignment dissipation never exceeds the exact-flow value.
  CHECK(eps * r.traj.back().align_int <= r.traj.back().stress_int * (1.0 + 1e-12));
}

TEST_CASE("sweep preconditions") {
  const PhaseGrid g = make_grid(1, 1.0, 16, 6.0, 64);
  CHECK_THROWS_AS(eps_sweep({1e-1, 1e-2, 1e-2, 1e-3}, g, {}), std::invalid_argument);
  CHECK_THROWS_WITH_AS(eps_sweep({1e-2}, g, {}), "sweep: need >= 3 distinct epsilon values", std::invalid_argument);
  CHECK_THROWS_AS(eps_sweep({1e-1, 5e-2, 2e-2}, g, {}), std::invalid_argument);
  CHECK_THROWS_AS(eps_sweep({1e-1, 1e-2, -1e-3}, g, {}), std::invalid_argument);
}

TEST_CASE("convergence metrics") {
  const PhaseGrid g = make_grid(1, 1.0, 1024, 4.0, 12);
  Index node = -1;
  for (Index j = 0; j < g.nvel(); ++j)
    if (std::abs(g.vc(0, j) - 1.0) < 1e-12) node = j;
  REQUIRE(node >= 0);

  BaseProfiles base = sample_profile({}, g);
  base.u_f0.setOnes();
  const LimitState U = to_limit_state(base);
  DistF f = zero_distribution(g);
  for (Index c = 0; c < g.ncells(); ++c) f.data(node, c) = base.rho_f0(c) / g.hv;
  FluidState s;
  s.rho = U.rho;
  s.m = U.m;
  Metrics m = convergence_metrics(f, s, U, g);
  CHECK(m.rho_L1 == 0.0);
  CHECK(m.rho_Lgamma == 0.0);
  CHECK(m.coulomb < 1e-28);
  CHECK(m.momentum_L1 == 0.0);
  CHECK(m.mono_stress < 1e-28);

  const double delta = 1e-3;
  for (Index c = 0; c < g.ncells(); ++c) s.rho(c) += delta * std::sin(2 * M_PI * g.xc(0, c));
  m = convergence_metrics(f, s, U, g);
  CHECK(std::abs(m.rho_L1 - 2.0 * delta / M_PI) < 1e-8);
  const double lg = std::pow(oracle::simpson([&](double x) { return std::pow(delta * std::abs(std::sin(2 * M_PI * x)), 2.0); }, 0.0, 1.0, 1e-16), 0.5);
  CHECK(m.rho_Lgamma == doctest::Approx(lg).epsilon(1e-6));
}

TEST_CASE("log-log fit and inversions") {
  std::vector<double> x{1e-1, 1e-2, 1e-3, 1e-4}, y;
  for (double v : x) y.push_back(3.0 * std::sqrt(v));
  const LinearFit f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_loglog({1.0}, {1.0}), std::domain_error);
  CHECK_THROWS_AS(fit_loglog({1.0, 2.0}, {1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(fit_loglog({1.0, 1.0}, {1.0, 2.0}), std::domain_error);

  CHECK(count_inversions({4.0, 3.0, 2.0, 1.0}) == 0);
  CHECK(count_inversions({4.0, 4.1, 2.0, 2.2}) == 1);
  CHECK(count_inversions({1.0, 2.0, 3.0}) == 2);
}
