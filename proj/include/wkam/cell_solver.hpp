#pragma once

// Discrete weak KAM pair (phi, hbar) via a Lax-Oleinik fixed-point
// iteration: psi <- T+_dt psi until the increment becomes a constant shift;
// the shift rate is -hbar. Residual diagnostics check H(x, -D phi) = hbar
// away from kink nodes.

#include <stdexcept>

#include "wkam/lagrangian.hpp"
#include "wkam/torus.hpp"

namespace wkam {

struct CellSolution {
  GridScalarField phi;   // normalized: min node value = 0
  double hbar{0.0};
  double residual_sup{0.0};
  int iterations{0};
  double dt{0.0};
};

struct ConvergenceFailure : std::runtime_error {
  double residual;
  ConvergenceFailure(const std::string& what, double res)
      : std::runtime_error(what), residual(res) {}
};

// One step of the discrete Lax-Oleinik semigroup:
//   (T+_dt phi)(x) = min_v [ phi(x + dt v) + dt L(x, v) ]
// with v ranging over the box lattice. Monotone and adds constants.
// Requires dt > 0 and dt * box.radius <= 1/4.
GridScalarField lax_oleinik_step(const GridScalarField& phi, double dt,
                                 const LagrangianSpec& spec,
                                 const VelocityBox& box);

CellSolution solve_cell(const LagrangianSpec& spec, const GridSpec& grid,
                        double dt, double tol, int max_iter,
                        const VelocityBox& box);

// Convenience overload: lattice radius from an a-priori Lipschitz bound of
// the solution, dt from the grid (see default_cell_dt).
CellSolution solve_cell(const LagrangianSpec& spec, const GridSpec& grid,
                        double tol = 0.01, int max_iter = 200000);

// Upper bound on the Lipschitz constant of any solution:
// kinetic^*(|grad phi|) <= 2 sup|V| along the solution.
double solution_lipschitz_bound(const LagrangianSpec& spec);

VelocityBox default_cell_box(const LagrangianSpec& spec);
double default_cell_dt(const GridSpec& grid, const VelocityBox& box);

// sup over non-kink nodes of |H(x, -D_h phi) - hbar|; nodes whose
// one-sided slope jump exceeds 3x the median jump are excluded.
double viscosity_residual(const CellSolution& sol, const LagrangianSpec& spec,
                          const VelocityBox& box);

}  // namespace wkam
