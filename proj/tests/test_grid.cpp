#include <doctest.h>

#include <cmath>

#include "entrolimit/grid.hpp"
#include "oracles.hpp"

using namespace entrolimit;

TEST_CASE("grid spacing from sizes") {
  const PhaseGrid g = make_grid(1, 1.0, 64, 6.0, 64);
  CHECK(g.hx == doctest::Approx(1.0 / 64).epsilon(1e-15));
  CHECK(g.hv == doctest::Approx(12.0 / 64).epsilon(1e-15));
  CHECK(g.ncells() == 64);
  CHECK(g.nvel() == 64);
}

TEST_CASE("velocity nodes are midpoints") {
  const PhaseGrid g = make_grid(1, 1.0, 8, 1.0, 4);
  const double expect[] = {-0.75, -0.25, 0.25, 0.75};
  for (int j = 0; j < 4; ++j) CHECK(g.vc(0, j) == doctest::Approx(expect[j]).epsilon(1e-15));
}

TEST_CASE("invalid sizes are rejected") {
  CHECK_THROWS_AS(make_grid(1, 1.0, 8, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0, 1.0, 8, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(4, 1.0, 8, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 0.0, 8, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 1.0, 3, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 1.0, 8, -1.0, 4), std::invalid_argument);
}

TEST_CASE("weights sum to the box measure") {
  for (int d = 1; d <= 3; ++d) {
    const PhaseGrid g = make_grid(d, 2.0, 4, 1.5, 6);
    const double box = std::pow(3.0, d);
    CHECK(std::abs(g.w.sum() - box) / box < 1e-12);
    CHECK(g.cell_volume() == doctest::Approx(std::pow(0.5, d)));
    CHECK(g.domain_volume() == doctest::Approx(std::pow(2.0, d)));
  }
}

TEST_CASE("velocity_integral") {
  const PhaseGrid g1 = make_grid(1, 1.0, 8, 1.0, 4);
  CHECK(velocity_integral(g1, Eigen::ArrayXd::Ones(4)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(velocity_integral(g1, g1.vc.row(0).transpose().array()) == 0.0);

  const PhaseGrid g = make_grid(1, 1.0, 8, 6.0, 128);
  const auto gauss = [](double v) { return std::exp(-v * v / 0.2) / std::sqrt(0.2 * M_PI); };
  const double ref = oracle::simpson(gauss, -6.0, 6.0, 1e-14);
  const Eigen::ArrayXd vals = g.vc.row(0).transpose().array().unaryExpr(gauss);
  CHECK(std::abs(velocity_integral(g, vals) - ref) < 1e-6);
  CHECK(std::abs(ref - 1.0) < 1e-10);
}

TEST_CASE("property: midpoint rule is exact for affine integrands") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = U(rng), b = U(rng), vmax = 0.5 + std::abs(U(rng));
    const int nv = 2 * (2 + trial % 20);
    const PhaseGrid g = make_grid(1, 1.0, 4, vmax, nv);
    const Eigen::ArrayXd vals = a + b * g.vc.row(0).transpose().array();
    CHECK(velocity_integral(g, vals) == doctest::Approx(2.0 * vmax * a).epsilon(1e-12));
  }
}

TEST_CASE("property: mirrored nodes give reflection symmetry") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int d = 1; d <= 2; ++d) {
    const PhaseGrid g = make_grid(d, 1.0, 4, 2.0, 10);
    Eigen::ArrayXd vals(g.nvel()), mirrored(g.nvel());
    for (Index j = 0; j < g.nvel(); ++j) vals(j) = U(rng);
    // The node -v of flat index j is the flat index with every axis index reversed.
    for (Index j = 0; j < g.nvel(); ++j) {
      Index rem = j, mirror = 0, stride = 1;
      for (int k = 0; k < d; ++k) {
        const Index i = rem % g.nv;
        rem /= g.nv;
        mirror += (g.nv - 1 - i) * stride;
        stride *= g.nv;
      }
      CHECK((g.vc.col(mirror) + g.vc.col(j)).norm() == 0.0);
      mirrored(j) = vals(mirror);
    }
    CHECK(velocity_integral(g, mirrored) == doctest::Approx(velocity_integral(g, vals)).epsilon(1e-14));
  }
}

TEST_CASE("cell centres tile the torus once") {
  const PhaseGrid g = make_grid(2, 1.0, 4, 1.0, 4);
  CHECK(g.ncells() == 16);
  for (Index c = 0; c < g.ncells(); ++c)
    for (int k = 0; k < 2; ++k) {
      const double x = g.xc(k, c) / g.hx - 0.5;
      CHECK(std::abs(x - std::round(x)) < 1e-12);
      CHECK(g.xc(k, c) > 0.0);
      CHECK(g.xc(k, c) < 1.0);
    }
  for (int k = 0; k < 2; ++k)
    for (Index c = 0; c < g.ncells(); ++c) CHECK(g.down[k](g.up[k](c)) == c);
}

TEST_CASE("refined keeps the box and scales Nx") {
  const PhaseGrid g = make_grid(1, 2.0, 16, 3.0, 8).refined(2);
  CHECK(g.nx == 32);
  CHECK(g.L == 2.0);
  CHECK(g.vmax == 3.0);
  CHECK(g.nv == 8);
}
