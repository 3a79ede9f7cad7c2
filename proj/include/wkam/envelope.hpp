#pragma once

// Lower and upper Moreau-Yosida transforms of grid fields on T^d, the
// proximal shift b and proximal (sub/super)gradient p = -/+ b/kappa^2, and
// periodic mollification with the standard bump kernel.
//
// For a multilinearly interpolated field the objective
//   phi(x+w) + |w|^2/(2 kappa^2)
// is piecewise quadratic per grid cell, so the argmin over the certified
// search ball |w| <= sqrt(2 sup|phi|) kappa is found cell-by-cell in closed
// form (no scan).

#include "wkam/torus.hpp"

namespace wkam {

struct EnvelopeResult {
  double value{0.0};
  Vec b;        // proximal shift; |b| <= sqrt(2 sup|phi|) * kappa
  Vec p;        // -b/kappa^2 (lower) or +b/kappa^2 (upper)
  double kappa{0.0};
};

EnvelopeResult lower_envelope(const GridScalarField& phi, double kappa,
                              const TorusPoint& x);

// phi^kappa(x) = -(-phi)_kappa(x); p = +b/kappa^2.
EnvelopeResult upper_envelope(const GridScalarField& phi, double kappa,
                              const TorusPoint& x);

// Same transforms with a caller-supplied bound sup_bound >= sup|phi|;
// avoids the per-call field scan in tight loops.
EnvelopeResult lower_envelope(const GridScalarField& phi, double kappa,
                              const TorusPoint& x, double sup_bound);
EnvelopeResult upper_envelope(const GridScalarField& phi, double kappa,
                              const TorusPoint& x, double sup_bound);

// Periodic convolution with the bump kernel eta(w) ~ exp(-1/(1-|w|^2))
// scaled to radius delta, weights normalized to sum 1 over grid nodes.
// Requires 0 < delta < 1/4.
GridScalarField mollify(const GridScalarField& phi, double delta);

// Explicit constants behind the envelope shift/vicinity bounds for a Lipschitz
// field (constant K, sup bound c0):
//   |b| <= 2 K kappa^2 and |b| <= sqrt(2 c0) kappa combine to
//   |b| <= sqrt(2 K sqrt(2 c0)) kappa^{3/2}  =: C1 kappa^{3/2},
//   |phi - phi_kappa| <= K sqrt(2 c0) kappa + C1^2 kappa / 2 =: C2 kappa.
double envelope_c1(double K, double c0);
double envelope_c2(double K, double c0);

}  // namespace wkam
