#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "wkam/cell_solver.hpp"

using namespace wkam;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

LagrangianSpec pendulum(Family fam = Family::Mechanical, double lambda = 0.0) {
  LagrangianSpec s;
  s.family = fam;
  s.dim = 1;
  s.lambda = lambda;
  s.potential = {{{1, 0}, 1.0}};
  return s;
}

LagrangianSpec free_mech() {
  LagrangianSpec s;
  s.family = Family::Mechanical;
  s.dim = 1;
  return s;
}

VelocityBox small_box(double radius = 4.0, int per_axis = 256) {
  VelocityBox b;
  b.radius = radius;
  b.per_axis = per_axis;
  return b;
}

}  // namespace

TEST_CASE("lax_oleinik_step: constants, monotonicity, nonexpansiveness") {
  auto g = GridSpec::make(1, 64);
  auto spec = free_mech();
  auto box = small_box();
  double dt = 0.05;

  auto c = GridScalarField::constant(g, 2.0);
  auto tc = lax_oleinik_step(c, dt, spec, box);
  for (double v : tc.values) CHECK(v == doctest::Approx(2.0));  // v=0 optimal, L=0

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  GridScalarField a, b;
  a.grid = b.grid = g;
  a.values.resize(64);
  b.values.resize(64);
  for (int i = 0; i < 64; ++i) {
    a.values[i] = u(rng);
    b.values[i] = a.values[i] + 0.5 * (u(rng) + 1.0);  // b >= a
  }
  auto ta = lax_oleinik_step(a, dt, spec, box);
  auto tb = lax_oleinik_step(b, dt, spec, box);
  for (int i = 0; i < 64; ++i) CHECK(ta.values[i] <= tb.values[i] + 1e-12);

  // adds constants exactly
  GridScalarField a3 = a;
  for (auto& v : a3.values) v += 3.0;
  auto ta3 = lax_oleinik_step(a3, dt, spec, box);
  for (int i = 0; i < 64; ++i)
    CHECK(ta3.values[i] - ta.values[i] == doctest::Approx(3.0).epsilon(1e-14));

  // nonexpansive in sup norm
  for (int trial = 0; trial < 10; ++trial) {
    GridScalarField f1 = a, f2 = a;
    for (auto& v : f1.values) v += 0.3 * u(rng);
    for (auto& v : f2.values) v += 0.3 * u(rng);
    auto t1 = lax_oleinik_step(f1, dt, spec, box);
    auto t2 = lax_oleinik_step(f2, dt, spec, box);
    double din = 0, dout = 0;
    for (int i = 0; i < 64; ++i) {
      din = std::max(din, std::fabs(f1.values[i] - f2.values[i]));
      dout = std::max(dout, std::fabs(t1.values[i] - t2.values[i]));
    }
    CHECK(dout <= din + 1e-12);
  }
}

TEST_CASE("lax_oleinik_step of zero field matches direct lattice minimization") {
  auto g = GridSpec::make(1, 64);
  auto spec = pendulum();
  auto box = small_box();
  double dt = 0.03;
  auto zero = GridScalarField::constant(g, 0.0);
  auto t = lax_oleinik_step(zero, dt, spec, box);
  for (int i = 0; i < 64; i += 3) {
    double direct = 1e300;
    for (int j = 0; j <= box.per_axis; ++j) {
      double v = -box.radius + j * box.spacing();
      direct = std::min(direct, dt * eval_L(spec, g.node(i), Vec(v)));
    }
    CHECK(t.values[i] == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("step preconditions") {
  auto g = GridSpec::make(1, 64);
  auto zero = GridScalarField::constant(g, 0.0);
  CHECK_THROWS_AS(lax_oleinik_step(zero, 0.0, free_mech(), small_box()),
                  std::invalid_argument);
  CHECK_THROWS_AS(lax_oleinik_step(zero, 0.2, free_mech(), small_box(4.0)),
                  std::invalid_argument);
}

TEST_CASE("x-independent Lagrangian: hbar = 0, flat solution") {
  auto sol = solve_cell(free_mech(), GridSpec::make(1, 64), 0.05, 1e-6, 20000,
                        small_box());
  CHECK(sol.hbar == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(sol.phi.max_value() <= 1e-5);
  CHECK(sol.residual_sup <= 1e-6);
}

TEST_CASE("pendulum golden value on a coarse grid") {
  auto sol = solve_cell(pendulum(), GridSpec::make(1, 64));
  CHECK(sol.hbar == doctest::Approx(1.0).epsilon(0.05));
  // analytic |phi'| = 2|sin(pi x)|: check the profile shape loosely
  auto oracle = GridScalarField::sample(sol.phi.grid, [](const TorusPoint& p) {
    double x = p[0] <= 0.5 ? p[0] : 1.0 - p[0];
    return 2.0 / std::acos(-1.0) * (1.0 - std::cos(std::acos(-1.0) * x));
  });
  double mo = oracle.min_value();
  for (auto& v : oracle.values) v -= mo;
  double err = 0;
  for (int i = 0; i < 64; ++i)
    err = std::max(err, std::fabs(sol.phi.values[i] - oracle.values[i]));
  CHECK(err <= 0.1);
}

TEST_CASE("kinked pendulum golden value on a coarse grid") {
  auto sol = solve_cell(pendulum(Family::Kinked, 1.0), GridSpec::make(1, 64));
  CHECK(sol.hbar == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("hbar invariant under constant initial shift and refinement") {
  auto spec = pendulum();
  auto g = GridSpec::make(1, 64);
  auto box = default_cell_box(spec);
  double dt = default_cell_dt(g, box);
  auto s1 = solve_cell(spec, g, dt, 0.01, 200000, box);
  auto g2 = GridSpec::make(1, 128);
  auto s2 = solve_cell(spec, g2, default_cell_dt(g2, box), 0.01, 200000, box);
  CHECK(std::fabs(s1.hbar - s2.hbar) <= 0.04);

  // sandwich check at the discrete level
  auto stepped = lax_oleinik_step(s1.phi, dt, spec, box);
  double dev = 0;
  for (std::size_t i = 0; i < stepped.values.size(); ++i)
    dev = std::max(dev, std::fabs(stepped.values[i] -
                                  (s1.phi.values[i] - dt * s1.hbar)));
  CHECK(dev <= s1.residual_sup * dt + 1e-9);
}

TEST_CASE("max_iter exceeded raises convergence failure") {
  CHECK_THROWS_AS(solve_cell(pendulum(), GridSpec::make(1, 64), 0.01, 1e-9, 5,
                             small_box()),
                  ConvergenceFailure);
}

TEST_CASE("viscosity residual") {
  // constant solution of an x-independent Lagrangian
  auto flat = solve_cell(free_mech(), GridSpec::make(1, 64), 0.05, 1e-6, 20000,
                         small_box());
  CHECK(viscosity_residual(flat, free_mech(), small_box()) <= 0.01);

  auto spec = pendulum();
  auto sol = solve_cell(spec, GridSpec::make(1, 256));
  double r256 = viscosity_residual(sol, spec, default_cell_box(spec));
  CHECK(r256 <= 0.1);
  // compare against the analytic gradient away from kinks
  const double pi = std::acos(-1.0);
  int checked = 0;
  for (int i = 2; i < 254; ++i) {
    double x = i / 256.0;
    if (std::fabs(x - 0.5) < 0.05 || x < 0.05 || x > 0.95) continue;
    double num = (sol.phi.values[i + 1] - sol.phi.values[i - 1]) * 256.0 / 2.0;
    double ana = (x < 0.5 ? 2.0 : -2.0) * std::fabs(std::sin(pi * x));
    CHECK(std::fabs(std::fabs(num) - std::fabs(ana)) <= 0.08);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("residual shrinks under refinement") {
  auto spec = pendulum();
  auto a = solve_cell(spec, GridSpec::make(1, 256));
  auto b = solve_cell(spec, GridSpec::make(1, 512));
  auto box = default_cell_box(spec);
  CHECK(viscosity_residual(b, spec, box) <=
        viscosity_residual(a, spec, box) + 1e-9);
}
