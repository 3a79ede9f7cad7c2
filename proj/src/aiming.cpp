#include "wkam/aiming.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "wkam/envelope.hpp"

namespace wkam {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// phi shifted by -(max+min)/2: constants cancel in b and p, and the
// smaller sup|phi| tightens both the envelope search radius and the
// schedule constants.
GridScalarField centered(const GridScalarField& phi) {
  GridScalarField out = phi;
  double mid = 0.5 * (phi.max_value() + phi.min_value());
  for (double& v : out.values) v -= mid;
  return out;
}

struct FeedbackResult {
  Vec v;
  double level;  // p.v + L(y, v) at the chosen velocity
};

FeedbackResult feedback_impl(const GridScalarField& phi_centered, double kappa,
                             const LagrangianSpec& spec, const TorusPoint& x,
                             double sup_bound) {
  EnvelopeResult env = lower_envelope(phi_centered, kappa, x, sup_bound);
  TorusPoint y = wrap(x.as_vec() + env.b);
  VelocityBox box;
  box.radius = velocity_bound(spec, env.p.norm());
  box.per_axis = 32;
  Vec v = argmax_velocity(spec, y, -env.p, box);
  if (v.norm() > box.radius + 1e-9)
    throw std::logic_error("feedback_direction: velocity escaped the C3 ball");
  return {v, env.p.dot(v) + eval_L(spec, y, v)};
}

}  // namespace

Partition Partition::uniform(double r, double fineness_bound) {
  if (!(r > 0.0) || !(fineness_bound > 0.0))
    throw std::invalid_argument("Partition::uniform: r and fineness must be positive");
  Partition p;
  p.r = r;
  p.n = static_cast<long long>(std::ceil(r / fineness_bound));
  if (p.n < 1) p.n = 1;
  return p;
}

double segment_cost(const LagrangianSpec& spec, const TorusPoint& x,
                    const Vec& v, double dt) {
  double acc = dt * spec.kinetic(v);
  for (const CosineMode& m : spec.potential) {
    double kx = m.k[0] * x[0], kv = m.k[0] * v[0];
    if (spec.dim == 2) {
      kx += m.k[1] * x[1];
      kv += m.k[1] * v[1];
    }
    double theta = kTwoPi * kx;
    double omega = kTwoPi * kv;
    // integral of cos(theta + omega t) over [0, dt]
    double integral;
    if (omega == 0.0) {
      integral = dt * std::cos(theta);
    } else {
      double half = 0.5 * omega * dt;
      integral = 2.0 * std::cos(theta + half) * std::sin(half) / omega;
    }
    acc -= m.a * integral;
  }
  return acc;
}

Vec feedback_direction(const GridScalarField& phi, double kappa,
                       const LagrangianSpec& spec, const TorusPoint& x) {
  if (!(kappa > 0.0))
    throw std::invalid_argument("feedback_direction: kappa must be positive");
  GridScalarField phic = centered(phi);
  return feedback_impl(phic, kappa, spec, x, phic.sup_abs()).v;
}

AimingSchedule AimingSchedule::certified(const LagrangianSpec& spec,
                                         const GridScalarField& phi,
                                         double epsilon) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("AimingSchedule: epsilon must be positive");
  AimingSchedule s;
  s.epsilon = epsilon;
  GridScalarField phic = centered(phi);
  s.K = phic.grid_lipschitz();
  s.c0 = phic.sup_abs();
  s.c1 = envelope_c1(s.K, s.c0);
  s.c2 = envelope_c2(s.K, s.c0);
  s.c3 = velocity_bound(spec, s.K);

  double lip_v = spec.potential_lip();
  s.kappa0 = s.c2 > 0.0 ? epsilon / s.c2 : 1.0;
  if (modulus(spec, s.c3, s.c1 * std::pow(s.kappa0, 1.5)) > epsilon / 2.0) {
    // modulus is min(lip_v * d, 2 sup|V|); a positive value forces lip_v > 0
    double dmax = (epsilon / 2.0) / lip_v;
    s.kappa0 = std::min(s.kappa0, std::pow(dmax / s.c1, 2.0 / 3.0));
  }
  s.kappa = s.kappa0;
  s.delta = epsilon * s.kappa * s.kappa / (2.0 * s.c3 * s.c3);
  if (modulus(spec, s.c3, s.delta * s.c3) > epsilon / 4.0)
    s.delta = std::min(s.delta, (epsilon / 4.0) / lip_v / s.c3);
  s.validate(spec);
  return s;
}

void AimingSchedule::validate(const LagrangianSpec& spec) const {
  if (!(kappa0 > 0.0) || !(kappa > 0.0) || kappa > kappa0 || !(delta > 0.0))
    throw std::invalid_argument("AimingSchedule: need 0 < kappa <= kappa0, delta > 0");
  if (c2 * kappa0 > epsilon * (1.0 + 1e-12))
    throw std::invalid_argument("AimingSchedule: C2 kappa0 <= epsilon fails");
  if (modulus(spec, c3, c1 * std::pow(kappa0, 1.5)) > epsilon / 2.0 + 1e-12)
    throw std::invalid_argument("AimingSchedule: omega(C1 kappa0^{3/2}) <= epsilon/2 fails");
  if (delta > epsilon * kappa * kappa / (2.0 * c3 * c3) * (1.0 + 1e-12))
    throw std::invalid_argument("AimingSchedule: delta <= epsilon kappa^2/(2 C3^2) fails");
  if (modulus(spec, c3, delta * c3) > epsilon / 4.0 + 1e-12)
    throw std::invalid_argument("AimingSchedule: omega(delta C3) <= epsilon/4 fails");
}

ControlledProcess simulate(const TorusPoint& y, const GridScalarField& phi,
                           double kappa, const Partition& part,
                           const LagrangianSpec& spec,
                           const AimingSchedule* schedule, int max_samples,
                           const StepObserver& observer) {
  if (!(kappa > 0.0))
    throw std::invalid_argument("simulate: kappa must be positive");
  if (max_samples < 2) max_samples = 2;
  GridScalarField phic = centered(phi);

  ControlledProcess proc;
  proc.r = part.r;
  proc.start = y;
  proc.steps = part.n;
  proc.kappa = kappa;
  proc.fineness = part.fineness();
  proc.certified = schedule != nullptr && schedule->covers(kappa, part.fineness());

  const double dt = part.fineness();
  const double sup = phic.sup_abs();
  const long long stride =
      std::max<long long>(1, part.n / static_cast<long long>(max_samples - 1));
  TorusPoint x = y;
  double cost = 0.0;
  for (long long i = 0; i < part.n; ++i) {
    FeedbackResult fb = feedback_impl(phic, kappa, spec, x, sup);
    if (i % stride == 0)
      proc.samples.push_back({part.time(i), x, fb.v, cost});
    if (fb.level > proc.max_step_level) proc.max_step_level = fb.level;
    if (observer) observer(x, fb.v, dt);
    cost += segment_cost(spec, x, fb.v, dt);
    x = wrap(x.as_vec() + fb.v * dt);
  }
  proc.end = x;
  proc.cost = cost;
  proc.samples.push_back({part.r, x, Vec::zero(x.dim), cost});
  return proc;
}

UpperEstimateReport upper_estimate_check(const ControlledProcess& proc,
                                         const GridScalarField& phi,
                                         double hbar, double epsilon,
                                         const LagrangianSpec& spec) {
  GridScalarField phic = centered(phi);
  double K = phic.grid_lipschitz();
  double c0 = phic.sup_abs();
  double c1 = envelope_c1(K, c0);
  double c2 = envelope_c2(K, c0);
  double c3 = velocity_bound(spec, K);

  UpperEstimateReport rep;
  rep.certified = proc.certified;
  rep.lhs = interpolate(phi, proc.end) + proc.cost;
  rep.margin = rep.lhs - (interpolate(phi, proc.start) - hbar * proc.r);
  rep.bound = (proc.r + 1.0) * epsilon;
  // the discrete phi is only an approximate supersolution; its worst
  // per-step defect p.v + L(y, v) + hbar enters linearly in the horizon
  double defect = std::max(0.0, proc.max_step_level + hbar);
  rep.slack = defect * proc.r + 1e-9 * (proc.r + 1.0);
  rep.pass = rep.margin <= rep.bound + rep.slack;

  double dd = proc.fineness, kap = proc.kappa;
  if (kap > 0.0) {
    rep.term_dt = proc.r * dd * c3 * c3 / (2.0 * kap * kap);
    rep.term_mod_fineness = proc.r * modulus(spec, c3, dd * c3);
    rep.term_mod_kappa = proc.r * modulus(spec, c3, c1 * std::pow(kap, 1.5));
    rep.term_c2kappa = c2 * kap;
  }
  if (!proc.certified) rep.note = "uncertified";
  return rep;
}

std::string process_to_csv(const ControlledProcess& proc, int dim) {
  std::string out = dim == 1 ? "t,x0,v0,running_cost\n"
                             : "t,x0,x1,v0,v1,running_cost\n";
  char buf[160];
  for (const ProcessSample& s : proc.samples) {
    if (dim == 1)
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", s.t, s.x[0],
                    s.v[0], s.running_cost);
    else
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    s.t, s.x[0], s.x[1], s.v[0], s.v[1], s.running_cost);
    out += buf;
  }
  return out;
}

}  // namespace wkam
