#pragma once

// Falsification harness for the lower estimate: no controlled process,
// however constructed, should drive
//   phi(x(r)) + integral of L  below  phi(x(0)) - hbar r
// by more than the computable numerical slack. The theorem is universally
// quantified; this module samples that set of processes, including an
// annealed adversary.

#include <cstdint>
#include <vector>

#include "wkam/aiming.hpp"
#include "wkam/lagrangian.hpp"
#include "wkam/torus.hpp"

namespace wkam {

// Equal-duration piecewise-constant process from explicit velocities; all
// breakpoints stored, cost by exact per-segment integration.
ControlledProcess process_from_velocities(const LagrangianSpec& spec,
                                          const TorusPoint& y, double r,
                                          const std::vector<Vec>& velocities);

struct ProcessGenerator {
  enum class Kind {
    RandomPiecewise,
    BangBang,
    GradientDescentHeuristic,
    AdversarialAnnealed,  // handled by adversarial_fuzz
  };
  Kind kind{Kind::RandomPiecewise};
  std::uint64_t seed{0};
  double velocity_cap{0.0};  // <= 0: use 2 * velocity_bound(spec, Lip phi)
  int segments{32};          // at most 64
};

ControlledProcess generate_process(const ProcessGenerator& gen,
                                   const LagrangianSpec& spec,
                                   const GridScalarField& phi,
                                   const TorusPoint& y, double r);

// phi(x(r)) + cost. Recomputes the cost from the stored breakpoints when
// the trace is complete; long strided traces fall back to the accumulated
// value.
double total_functional(const ControlledProcess& proc,
                        const GridScalarField& phi, const LagrangianSpec& spec);

struct LowerCheck {
  double margin{0.0};  // total_functional - (phi(x(0)) - hbar r)
  double slack{0.0};   // residual_sup * r + quadrature budget
  bool pass{false};    // margin >= -slack
};

LowerCheck verify_lower(const ControlledProcess& proc,
                        const GridScalarField& phi, double hbar,
                        double residual_sup, const LagrangianSpec& spec);

struct FuzzReport {
  double min_margin{0.0};
  long long proposals{0};
  ControlledProcess worst;
};

// Simulated annealing over piecewise-constant velocity profiles (and the
// start point), minimizing the margin. cap <= 0 selects 2 * C3.
FuzzReport adversarial_fuzz(const LagrangianSpec& spec,
                            const GridScalarField& phi, double hbar, double r,
                            long long proposals, std::uint64_t seed,
                            int segments = 32, double cap = 0.0);

}  // namespace wkam
