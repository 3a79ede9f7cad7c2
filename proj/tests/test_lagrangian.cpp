#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "wkam/lagrangian.hpp"

using namespace wkam;

namespace {

LagrangianSpec pendulum() {
  LagrangianSpec s;
  s.family = Family::Mechanical;
  s.dim = 1;
  s.potential = {{{1, 0}, 1.0}};  // V = cos(2 pi x)
  return s;
}

LagrangianSpec free_particle(Family fam, double lambda = 0.0) {
  LagrangianSpec s;
  s.family = fam;
  s.dim = 1;
  s.lambda = lambda;
  return s;
}

double plus(double t) { return t > 0 ? t : 0.0; }

// closed-form Legendre conjugates of the kinetic parts, derived by hand
double kinetic_conj(const LagrangianSpec& s, const Vec& p) {
  switch (s.family) {
    case Family::Mechanical:
      return 0.5 * p.norm2();
    case Family::Kinked: {
      double t = plus(p.norm() - s.lambda);
      return 0.5 * t * t;
    }
    case Family::AnisotropicKink: {
      double acc = 0.0;
      for (int i = 0; i < s.dim; ++i) {
        double t = plus(std::fabs(p[i]) - s.lambdas[i]);
        acc += 0.5 * t * t;
      }
      return acc;
    }
    case Family::PiecewisePower: {
      // K(t) = t^{3/2} for t <= 4, t^2/2 for t >= 4
      double sp = p.norm();
      if (sp <= 3.0) return 4.0 * sp * sp * sp / 27.0;
      if (sp <= 4.0) return 4.0 * sp - 8.0;
      return 0.5 * sp * sp;
    }
  }
  return 0.0;
}

double hamiltonian_oracle(const LagrangianSpec& s, const TorusPoint& x, const Vec& p) {
  return kinetic_conj(s, p) + s.eval_V(x);
}

VelocityBox box_for(const LagrangianSpec& s, double pnorm) {
  VelocityBox b;
  b.radius = velocity_bound(s, pnorm);
  b.per_axis = s.dim == 1 ? 512 : 128;
  return b;
}

}  // namespace

TEST_CASE("eval_L examples") {
  auto mech = free_particle(Family::Mechanical);
  CHECK(eval_L(mech, wrap1(0.3), Vec(0.0)) == 0.0);

  auto kink = free_particle(Family::Kinked, 1.0);
  CHECK(eval_L(kink, wrap1(0.0), Vec(2.0)) == doctest::Approx(4.0));

  auto pend = pendulum();
  CHECK(eval_L(pend, wrap1(0.0), Vec(0.0)) == doctest::Approx(-1.0));

  // lower bound C2'
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-4, 4), ux(0, 1);
  for (int i = 0; i < 500; ++i)
    CHECK(eval_L(pend, wrap1(ux(rng)), Vec(u(rng))) >= pend.c2_prime() - 1e-12);
}

TEST_CASE("hamiltonian matches spec examples") {
  auto mech = free_particle(Family::Mechanical);
  CHECK(hamiltonian(mech, wrap1(0.1), Vec(0.0), box_for(mech, 0)) ==
        doctest::Approx(0.0).epsilon(1e-8));
  CHECK(hamiltonian(mech, wrap1(0.1), Vec(2.0), box_for(mech, 2)) ==
        doctest::Approx(2.0).epsilon(1e-7));

  auto kink = free_particle(Family::Kinked, 1.0);
  // flat region |p| <= lambda: brute-force-checked 0
  CHECK(hamiltonian(kink, wrap1(0.5), Vec(0.5), box_for(kink, 0.5)) ==
        doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("argmax_velocity examples and tie rules") {
  auto mech = free_particle(Family::Mechanical);
  CHECK(argmax_velocity(mech, wrap1(0), Vec(3.0), box_for(mech, 3))[0] ==
        doctest::Approx(3.0).epsilon(1e-6));

  auto kink = free_particle(Family::Kinked, 1.0);
  CHECK(argmax_velocity(kink, wrap1(0), Vec(0.5), box_for(kink, 0.5))[0] ==
        doctest::Approx(0.0));
  CHECK(argmax_velocity(kink, wrap1(0), Vec(2.0), box_for(kink, 2))[0] ==
        doctest::Approx(1.0).epsilon(1e-6));

  // lattice brute force confirms over random p for each family
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> up(-3, 3);
  for (Family fam : {Family::Mechanical, Family::Kinked, Family::PiecewisePower}) {
    auto s = free_particle(fam, 0.7);
    for (int i = 0; i < 20; ++i) {
      Vec p(up(rng));
      auto box = box_for(s, std::fabs(p[0]));
      Vec v = argmax_velocity(s, wrap1(0), p, box);
      double got = p.dot(v) - s.kinetic(v);
      double brute = -1e30;
      for (int j = 0; j <= 200000; ++j) {
        double t = -box.radius + 2 * box.radius * j / 200000.0;
        brute = std::max(brute, p[0] * t - s.kinetic(Vec(t)));
      }
      CHECK(got == doctest::Approx(brute).epsilon(1e-6));
      CHECK(v.norm() <= velocity_bound(s, p.norm()) + 1e-9);
    }
  }
}

TEST_CASE("velocity box precondition") {
  auto mech = free_particle(Family::Mechanical);
  VelocityBox tiny;
  tiny.radius = 0.5;
  tiny.per_axis = 16;
  CHECK_THROWS_AS(hamiltonian(mech, wrap1(0), Vec(2.0), tiny), std::invalid_argument);
}

TEST_CASE("velocity_bound derived examples") {
  auto mech = free_particle(Family::Mechanical);
  CHECK(velocity_bound(mech, 1.0) == doctest::Approx(4.0));
  CHECK(velocity_bound(mech, 0.0) == doctest::Approx(2.0));

  auto kink = free_particle(Family::Kinked, 1.0);
  for (double K : {0.0, 0.5, 1.0, 2.0})
    CHECK(velocity_bound(kink, K) <= velocity_bound(mech, K) + 1e-12);

  // no maximizer escapes the certified ball (lattice search on a larger box)
  auto pend = pendulum();
  for (double K : {0.0, 1.0, 2.0}) {
    double c3 = velocity_bound(pend, K);
    for (double p = -K; p <= K; p += std::max(K / 4, 0.25)) {
      double best = -1e30, bestv = 0.0;
      for (int j = 0; j <= 40000; ++j) {
        double t = -3 * c3 + 6 * c3 * j / 40000.0;
        double f = p * t - pend.kinetic(Vec(t));
        if (f > best) { best = f; bestv = t; }
      }
      CHECK(std::fabs(bestv) <= c3 + 1e-6);
    }
  }
}

TEST_CASE("modulus") {
  auto mech = free_particle(Family::Mechanical);
  CHECK(modulus(mech, 3.0, 0.2) == 0.0);

  auto pend = pendulum();
  CHECK(modulus(pend, 5.0, 0.0) == 0.0);
  double w = modulus(pend, 5.0, 0.01);
  CHECK(w == doctest::Approx(2 * std::acos(-1.0) * 0.01));

  // sampled sup over x,y pairs agrees within 5%
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ux(0, 1), us(-0.01, 0.01);
  double sampled = 0.0;
  for (int i = 0; i < 20000; ++i) {
    double x = ux(rng), dx = us(rng);
    sampled = std::max(sampled, std::fabs(pend.eval_V(wrap1(x)) - pend.eval_V(wrap1(x + dx))));
  }
  CHECK(sampled <= w * 1.0 + 1e-12);
  CHECK(sampled >= w * 0.95);

  // monotone in delta
  double prev = 0.0;
  for (double d : {0.0, 0.05, 0.1, 0.5, 2.0}) {
    double cur = modulus(pend, 1.0, d);
    CHECK(cur >= prev - 1e-15);
    prev = cur;
  }
  CHECK(modulus(pend, 1.0, 100.0) == doctest::Approx(2.0));
}

TEST_CASE("Fenchel-Young and convexity of H in p") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-2.5, 2.5), ux(0, 1);
  for (Family fam : {Family::Mechanical, Family::Kinked, Family::AnisotropicKink,
                     Family::PiecewisePower}) {
    LagrangianSpec s = pendulum();
    s.family = fam;
    s.lambda = 0.8;
    s.lambdas = {0.8, 0.0};
    for (int i = 0; i < 60; ++i) {
      TorusPoint x = wrap1(ux(rng));
      Vec p(u(rng)), v(u(rng));
      auto box = box_for(s, std::fabs(p[0]));
      double H = hamiltonian(s, x, p, box);
      CHECK(p.dot(v) <= H + eval_L(s, x, v) + 1e-6);
      // closed-form oracle
      CHECK(H == doctest::Approx(hamiltonian_oracle(s, x, p)).epsilon(1e-5));
    }
    // midpoint convexity along random segments
    for (int i = 0; i < 25; ++i) {
      TorusPoint x = wrap1(ux(rng));
      Vec p1(u(rng)), p2(u(rng));
      Vec pm((p1[0] + p2[0]) / 2);
      auto box = box_for(s, std::max(std::fabs(p1[0]), std::fabs(p2[0])));
      double hm = hamiltonian(s, x, pm, box);
      double h1 = hamiltonian(s, x, p1, box);
      double h2 = hamiltonian(s, x, p2, box);
      CHECK(hm <= 0.5 * (h1 + h2) + 1e-8);
    }
  }
}

TEST_CASE("10x10x10 closed-form sweep per family") {
  for (Family fam : {Family::Mechanical, Family::Kinked, Family::AnisotropicKink,
                     Family::PiecewisePower}) {
    for (int ip = 0; ip < 10; ++ip)
      for (int ix = 0; ix < 10; ++ix)
        for (int il = 0; il < 10; ++il) {
          LagrangianSpec s;
          s.family = fam;
          s.dim = 1;
          s.lambda = 0.1 + 0.15 * il;
          s.lambdas = {s.lambda, 0.0};
          s.potential = {{{1, 0}, 0.3 + 0.05 * il}};
          TorusPoint x = wrap1(ix / 10.0);
          Vec p(-2.5 + 0.5 * ip);
          auto box = box_for(s, std::fabs(p[0]));
          CHECK(hamiltonian(s, x, p, box) ==
                doctest::Approx(hamiltonian_oracle(s, x, p)).epsilon(1e-5));
        }
  }
}

TEST_CASE("json config parsing") {
  auto s = LagrangianSpec::from_json_text(
      R"({"family": "kinked", "lambda": 1.0, "potential": {"cos_coeffs": [[1, 1.0]]}})");
  CHECK(s.family == Family::Kinked);
  CHECK(s.lambda == 1.0);
  REQUIRE(s.potential.size() == 1);
  CHECK(s.potential[0].k[0] == 1);
  CHECK(s.potential[0].a == 1.0);
  CHECK(s.eval_V(wrap1(0.0)) == doctest::Approx(1.0));

  auto round = LagrangianSpec::from_json_text(s.to_json_text());
  CHECK(round.family == s.family);
  CHECK(round.potential.size() == s.potential.size());

  CHECK_THROWS(LagrangianSpec::from_json_text(R"({"family": "nope"})"));
}
