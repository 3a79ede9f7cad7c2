#pragma once

// Built-in Lagrangian families L(x, v) = kinetic(v) - V(x) with V a finite
// cosine sum. All families are continuous, superlinear in v, and may be
// nonsmooth at v = 0. The Hamiltonian is the numeric Legendre transform
// (velocity-lattice scan + golden-section refinement); closed-form
// conjugates live only in test oracles.

#include <string>
#include <vector>

#include "wkam/torus.hpp"

namespace wkam {

enum class Family { Mechanical, Kinked, AnisotropicKink, PiecewisePower };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// One cosine mode of the potential: a * cos(2*pi * k.x).
struct CosineMode {
  std::array<int, 2> k{0, 0};
  double a{0.0};
};

struct LagrangianSpec {
  Family family{Family::Mechanical};
  int dim{1};
  double lambda{0.0};                  // kinked
  std::array<double, 2> lambdas{0.0, 0.0};  // anisotropic-kink, per axis
  std::vector<CosineMode> potential;

  double eval_V(const TorusPoint& x) const;
  // Kinetic part; L(x,v) = kinetic(v) - V(x).
  double kinetic(const Vec& v) const;

  // sup_x |V(x)| bounded by sum |a_k| (exact for single-mode potentials).
  double potential_sup() const;
  // Lipschitz constant bound of V: sum |a_k| * 2*pi*|k|.
  double potential_lip() const;

  // C1' = sup_y |L(y,0)| = sup |V|.
  double c1_prime() const { return potential_sup(); }
  // Lower bound of L; kinetic >= 0 so L >= -sup|V|. Always <= 0.
  double c2_prime() const { return -potential_sup(); }

  // Growth witness: radius c(m) with L(x,v) >= m|v| for all |v| >= c(m).
  double growth_radius(double m) const;

  static LagrangianSpec from_json_text(const std::string& text);
  std::string to_json_text() const;
};

double eval_L(const LagrangianSpec& spec, const TorusPoint& x, const Vec& v);

// Velocity search lattice covering the ball of the given radius.
struct VelocityBox {
  double radius{1.0};
  int per_axis{64};  // lattice points per axis is per_axis + 1

  double spacing() const { return 2.0 * radius / per_axis; }
};

// C3 = max(c(K + C1' + 1), 1): any maximizer of p.v - L(x,v) with |p| <= K
// lies in the ball of this radius.
double velocity_bound(const LagrangianSpec& spec, double K);

// H(x, p) by lattice scan over the box plus per-axis golden-section
// refinement (tolerance 1e-8). Throws std::invalid_argument when the box
// cannot certify containment of the maximizer.
double hamiltonian(const LagrangianSpec& spec, const TorusPoint& x, const Vec& p,
                   const VelocityBox& box);

// Maximizing velocity; ties broken by smallest |v|, then lexicographic.
Vec argmax_velocity(const LagrangianSpec& spec, const TorusPoint& x, const Vec& p,
                    const VelocityBox& box);

// Upper estimate of the modulus of continuity omega_A(delta) of L in x.
// x-dependence of every built-in sits in V, so the bound is
// min(Lip(V)*delta, 2*sup|V|), independent of A.
double modulus(const LagrangianSpec& spec, double A, double delta);

}  // namespace wkam
