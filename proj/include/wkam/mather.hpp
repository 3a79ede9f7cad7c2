#pragma once

// Discretized holonomic-measure linear program: minimize the integral of L
// over probability measures on an (x-grid) x (velocity-lattice) product,
// subject to truncated-Fourier holonomy constraints. The optimum recovers
// minus the effective Hamiltonian; occupation measures of trajectories are
// asymptotically feasible.

#include <array>
#include <vector>

#include "wkam/aiming.hpp"
#include "wkam/lagrangian.hpp"
#include "wkam/simplex.hpp"
#include "wkam/torus.hpp"

namespace wkam {

// Probability weights on x-nodes x v-lattice nodes; the v lattice is the
// VelocityBox grid with per_axis + 1 points per axis (per_axis even, so
// v = 0 is a node). Index = x_index * num_v + v_index.
struct DiscreteMeasure {
  GridSpec xgrid;
  VelocityBox vbox;
  std::vector<double> weights;

  std::size_t num_v() const;
  Vec v_node(std::size_t j) const;
  double total() const;
};

// Fourier modes 0 < |k|_inf <= M, one representative per +/-k pair; each
// mode contributes a cos and a sin holonomy row.
struct HolonomyBasis {
  int dim{1};
  int M{0};
  std::vector<std::array<int, 2>> modes;

  static HolonomyBasis make(int dim, int M);
  int rows() const { return 2 * static_cast<int>(modes.size()); }
};

// Equality-form LP: holonomy rows (= 0), then normalization (= 1);
// objective L(x, v) per node. Requires an even per_axis and a lattice
// radius covering the superlinearity ball (radius >= growth_radius(1)).
LinearProgram build_lp(const LagrangianSpec& spec, const GridSpec& xgrid,
                       const VelocityBox& vbox, const HolonomyBasis& basis);

struct MatherSolution {
  double value{0.0};
  DiscreteMeasure measure;
  SimplexResult lp;
};

MatherSolution solve_mather_lp(const LagrangianSpec& spec, const GridSpec& xgrid,
                               const VelocityBox& vbox, const HolonomyBasis& basis,
                               long long max_iter = 0);

// Time-average empirical measure of a fully recorded process; positions
// binned to the nearest x-node (segments subdivided below half a cell of
// travel), velocities to the nearest lattice node.
DiscreteMeasure occupation_measure(const ControlledProcess& proc,
                                   const GridSpec& xgrid, const VelocityBox& vbox);

// Streaming variant for runs too long to record: feed (x, v, duration)
// per step, e.g. from the simulate observer.
class OccupationBinner {
 public:
  OccupationBinner(const GridSpec& xgrid, const VelocityBox& vbox);
  void add(const TorusPoint& x, const Vec& v, double duration);
  DiscreteMeasure finish() const;  // normalized to total mass 1

 private:
  DiscreteMeasure acc_;
  double total_time_{0.0};
};

double measure_integral_L(const DiscreteMeasure& m, const LagrangianSpec& spec);

// max over basis rows of |integral of grad(phi_k).v dm|.
double holonomy_residual(const DiscreteMeasure& m, const HolonomyBasis& basis);

// sup over nodes of [H(x, -grad mollify(phi, delta)) - hbar
//                    - modulus(spec, delta)]_+ with centered differences.
double subsolution_residual_mollified(const GridScalarField& phi, double delta,
                                      double hbar, const LagrangianSpec& spec,
                                      const VelocityBox& box);

// CSV dump: x coords, v coords, weight; weights < 1e-12 omitted.
std::string measure_to_csv(const DiscreteMeasure& m);

}  // namespace wkam
