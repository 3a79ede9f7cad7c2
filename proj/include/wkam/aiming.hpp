#pragma once

// Proximal-aiming feedback v_kappa[x] and the Krasovskii-Subbotin
// step-by-step trajectory scheme, together with the certified parameter
// schedule (epsilon, kappa0, kappa, delta) and the upper-estimate ledger.

#include <functional>
#include <string>
#include <vector>

#include "wkam/lagrangian.hpp"
#include "wkam/torus.hpp"

namespace wkam {

// Uniform partition of [0, r] into n cells. Kept implicit (r, n) rather
// than as a stored time vector: certified runs take ~1e8 steps.
struct Partition {
  double r{1.0};
  long long n{1};

  // Coarsest uniform partition whose fineness is <= bound.
  static Partition uniform(double r, double fineness_bound);

  double fineness() const { return r / static_cast<double>(n); }
  double time(long long i) const { return r * static_cast<double>(i) / static_cast<double>(n); }
};

struct ProcessSample {
  double t{0.0};
  TorusPoint x;
  Vec v;                  // velocity on [t, next t); unused on the last sample
  double running_cost{0.0};
};

// Piecewise-constant-velocity controlled process on [0, r]. For short
// processes `samples` holds every breakpoint; long aiming runs keep a
// strided trace (endpoints always included) while cost/end are exact.
struct ControlledProcess {
  double r{0.0};
  TorusPoint start;
  TorusPoint end;
  double cost{0.0};       // accumulated integral of L along the motion
  long long steps{0};
  double kappa{0.0};      // 0 for processes not produced by the feedback
  double fineness{0.0};
  bool certified{false};
  // max over steps of p_i.v_i + L(y_i, v_i); the supersolution defect of
  // the discrete phi enters the numerical slack through this.
  double max_step_level{-1e300};
  std::vector<ProcessSample> samples;
};

// Exact integral of L(x + t v, v) over t in [0, dt]: the kinetic part is
// constant along a segment and each cosine mode integrates in closed form.
double segment_cost(const LagrangianSpec& spec, const TorusPoint& x,
                    const Vec& v, double dt);

// v_kappa[x]: lower envelope of phi at x gives (b, p); the feedback is the
// argmax of -p.v - L(x + b, v), searched over the certified velocity ball.
Vec feedback_direction(const GridScalarField& phi, double kappa,
                       const LagrangianSpec& spec, const TorusPoint& x);

// Parameter schedule of the upper-estimate theorem. All four defining
// inequalities are rechecked by validate(); construction picks the largest
// kappa0 and delta that satisfy them for the given accuracy target.
struct AimingSchedule {
  double epsilon{0.0};
  double kappa0{0.0};
  double kappa{0.0};    // chosen in (0, kappa0]
  double delta{0.0};    // fineness bound delta(kappa)
  // constants the schedule was built from
  double K{0.0};        // Lipschitz constant of phi
  double c0{0.0};       // sup |phi| after centering
  double c1{0.0};
  double c2{0.0};
  double c3{0.0};

  static AimingSchedule certified(const LagrangianSpec& spec,
                                  const GridScalarField& phi, double epsilon);

  // Throws std::invalid_argument if any of the four schedule inequalities
  // fails:
  //   C2 kappa0 <= eps, omega_{C3}(C1 kappa0^{3/2}) <= eps/2,
  //   delta <= eps kappa^2 / (2 C3^2), omega_{C3}(delta C3) <= eps/4.
  void validate(const LagrangianSpec& spec) const;

  bool covers(double kappa_used, double fineness) const {
    return kappa_used > 0.0 && kappa_used <= kappa0 && fineness <= delta;
  }
};

// Per-step observer: state, velocity and duration of each partition cell;
// lets callers accumulate (e.g. occupation bins) without storing the run.
using StepObserver = std::function<void(const TorusPoint& x, const Vec& v, double dt)>;

// Run the step scheme from y. A run is tagged certified when a schedule is
// supplied and (kappa, fineness) sit within it; the schedule is checked,
// never silently enforced.
ControlledProcess simulate(const TorusPoint& y, const GridScalarField& phi,
                           double kappa, const Partition& part,
                           const LagrangianSpec& spec,
                           const AimingSchedule* schedule = nullptr,
                           int max_samples = 2049,
                           const StepObserver& observer = {});

struct UpperEstimateReport {
  bool pass{false};
  bool certified{false};
  double lhs{0.0};      // phi(x(r)) + cost
  double margin{0.0};   // lhs - (phi(y) - hbar r); bound: (r+1) eps + slack
  double bound{0.0};    // (r+1) eps
  double slack{0.0};    // supersolution-defect budget, reported
  // the proof terms, evaluated numerically
  double term_dt{0.0};            // r d(Delta) C3^2 / (2 kappa^2)
  double term_mod_fineness{0.0};  // r omega_{C3}(d(Delta) C3)
  double term_mod_kappa{0.0};     // r omega_{C3}(C1 kappa^{3/2})
  double term_c2kappa{0.0};       // C2 kappa
  std::string note;
};

UpperEstimateReport upper_estimate_check(const ControlledProcess& proc,
                                         const GridScalarField& phi,
                                         double hbar, double epsilon,
                                         const LagrangianSpec& spec);

// CSV dump of the stored trace: t, x (d cols), v (d cols), running_cost.
std::string process_to_csv(const ControlledProcess& proc, int dim);

}  // namespace wkam
