#include "wkam/lower_bound.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace wkam {

namespace {

double default_cap(const LagrangianSpec& spec, const GridScalarField& phi) {
  return 2.0 * velocity_bound(spec, phi.grid_lipschitz());
}

Vec clamp_cap(Vec v, double cap) {
  double n = v.norm();
  if (n > cap) v = v * (cap / n);
  return v;
}

// central-difference gradient of phi at x, step = one grid cell
Vec grid_gradient(const GridScalarField& phi, const TorusPoint& x) {
  double h = phi.grid.h();
  Vec g = Vec::zero(phi.grid.dim);
  for (int i = 0; i < phi.grid.dim; ++i) {
    Vec e = Vec::zero(phi.grid.dim);
    e[i] = h;
    g[i] = (interpolate(phi, wrap(x.as_vec() + e)) -
            interpolate(phi, wrap(x.as_vec() - e))) /
           (2.0 * h);
  }
  return g;
}

}  // namespace

ControlledProcess process_from_velocities(const LagrangianSpec& spec,
                                          const TorusPoint& y, double r,
                                          const std::vector<Vec>& velocities) {
  if (r < 0.0) throw std::invalid_argument("process_from_velocities: r < 0");
  if (r > 0.0 && velocities.empty())
    throw std::invalid_argument("process_from_velocities: no segments");
  ControlledProcess proc;
  proc.r = r;
  proc.start = y;
  proc.steps = static_cast<long long>(velocities.size());
  if (r == 0.0) {
    proc.end = y;
    proc.samples.push_back({0.0, y, Vec::zero(y.dim), 0.0});
    return proc;
  }
  double dt = r / static_cast<double>(velocities.size());
  TorusPoint x = y;
  double cost = 0.0;
  for (std::size_t i = 0; i < velocities.size(); ++i) {
    proc.samples.push_back({dt * static_cast<double>(i), x, velocities[i], cost});
    cost += segment_cost(spec, x, velocities[i], dt);
    x = wrap(x.as_vec() + velocities[i] * dt);
  }
  proc.end = x;
  proc.cost = cost;
  proc.samples.push_back({r, x, Vec::zero(x.dim), cost});
  return proc;
}

ControlledProcess generate_process(const ProcessGenerator& gen,
                                   const LagrangianSpec& spec,
                                   const GridScalarField& phi,
                                   const TorusPoint& y, double r) {
  if (gen.segments < 1 || gen.segments > 64)
    throw std::invalid_argument("generate_process: segments must be in [1, 64]");
  double cap = gen.velocity_cap > 0.0 ? gen.velocity_cap : default_cap(spec, phi);
  std::mt19937_64 rng(gen.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec> vels;
  vels.reserve(static_cast<std::size_t>(gen.segments));

  switch (gen.kind) {
    case ProcessGenerator::Kind::RandomPiecewise:
      for (int i = 0; i < gen.segments; ++i) {
        Vec v = Vec::zero(spec.dim);
        for (int k = 0; k < spec.dim; ++k) v[k] = cap * u(rng);
        vels.push_back(clamp_cap(v, cap));
      }
      break;
    case ProcessGenerator::Kind::BangBang:
      for (int i = 0; i < gen.segments; ++i) {
        Vec v = Vec::zero(spec.dim);
        int axis = spec.dim == 1 ? 0 : (rng() & 1);
        v[axis] = (rng() & 1) ? cap : -cap;
        vels.push_back(v);
      }
      break;
    case ProcessGenerator::Kind::GradientDescentHeuristic: {
      // follow -grad phi with a random speed per segment; needs the state
      // recurrence, so build segment by segment
      double dt = r / gen.segments;
      TorusPoint x = y;
      for (int i = 0; i < gen.segments; ++i) {
        Vec g = grid_gradient(phi, x);
        double speed = 0.5 * cap * (u(rng) + 1.0);
        double gn = g.norm();
        Vec v = gn > 1e-12 ? g * (-speed / gn) : Vec::zero(spec.dim);
        vels.push_back(v);
        x = wrap(x.as_vec() + v * dt);
      }
      break;
    }
    case ProcessGenerator::Kind::AdversarialAnnealed:
      throw std::invalid_argument(
          "generate_process: use adversarial_fuzz for the annealed kind");
  }
  return process_from_velocities(spec, y, r, vels);
}

double total_functional(const ControlledProcess& proc,
                        const GridScalarField& phi, const LagrangianSpec& spec) {
  double cost = proc.cost;
  if (static_cast<long long>(proc.samples.size()) == proc.steps + 1) {
    cost = 0.0;
    for (std::size_t i = 0; i + 1 < proc.samples.size(); ++i)
      cost += segment_cost(spec, proc.samples[i].x, proc.samples[i].v,
                           proc.samples[i + 1].t - proc.samples[i].t);
  }
  return interpolate(phi, proc.end) + cost;
}

LowerCheck verify_lower(const ControlledProcess& proc,
                        const GridScalarField& phi, double hbar,
                        double residual_sup, const LagrangianSpec& spec) {
  LowerCheck c;
  c.margin = total_functional(proc, phi, spec) -
             (interpolate(phi, proc.start) - hbar * proc.r);
  c.slack = residual_sup * proc.r + 1e-6 * (proc.r + 1.0);
  c.pass = c.margin >= -c.slack;
  return c;
}

FuzzReport adversarial_fuzz(const LagrangianSpec& spec,
                            const GridScalarField& phi, double hbar, double r,
                            long long proposals, std::uint64_t seed,
                            int segments, double cap) {
  if (segments < 1 || segments > 64)
    throw std::invalid_argument("adversarial_fuzz: segments must be in [1, 64]");
  if (cap <= 0.0) cap = default_cap(spec, phi);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto margin_of = [&](const TorusPoint& y, const std::vector<Vec>& vels) {
    ControlledProcess p = process_from_velocities(spec, y, r, vels);
    return total_functional(p, phi, spec) - (interpolate(phi, y) - hbar * r);
  };
  auto random_point = [&]() {
    return spec.dim == 1 ? wrap1(u01(rng)) : wrap2(u01(rng), u01(rng));
  };
  auto random_vels = [&]() {
    // cubing biases the draw toward slow profiles: superlinear kinetic
    // cost makes fast segments hopeless, but the tails keep the full
    // velocity ball reachable
    std::vector<Vec> vels(static_cast<std::size_t>(segments));
    for (auto& v : vels) {
      v = Vec::zero(spec.dim);
      for (int k = 0; k < spec.dim; ++k) {
        double t = u(rng);
        v[k] = cap * t * t * t;
      }
      v = clamp_cap(v, cap);
    }
    return vels;
  };

  FuzzReport rep;
  rep.proposals = proposals;
  double best = 1e300;
  TorusPoint best_y;
  std::vector<Vec> best_vels;

  const long long restart_every = std::max<long long>(1, proposals / 8);
  TorusPoint y;
  std::vector<Vec> cur;
  double cur_margin = 0.0;
  for (long long i = 0; i < proposals; ++i) {
    if (i % restart_every == 0) {
      y = random_point();
      cur = random_vels();
      cur_margin = margin_of(y, cur);
    }
    // geometric cooling per restart window: jitter shrinks from ~cap/2
    // down to ~1e-3 cap, so late proposals polish around the incumbent
    double frac = static_cast<double>(i % restart_every) /
                  static_cast<double>(restart_every);
    double temp = 0.5 * cap * std::pow(10.0, -3.0 * frac);
    TorusPoint ny = y;
    std::vector<Vec> nv = cur;
    double dice = u01(rng);
    if (dice < 0.10) {
      // teleport the start: the margin landscape in the start point has
      // well-separated basins that local moves cross too slowly
      ny = random_point();
    } else if (dice < 0.25) {
      // local start move (never fully frozen)
      double scale = std::max(0.25 * temp / cap, 0.01);
      Vec shift = Vec::zero(spec.dim);
      for (int k = 0; k < spec.dim; ++k) shift[k] = scale * gauss(rng);
      ny = wrap(y.as_vec() + shift);
    } else if (dice < 0.35) {
      // park one segment
      nv[static_cast<std::size_t>(rng() % nv.size())] = Vec::zero(spec.dim);
    } else if (dice < 0.42) {
      // park the whole tail: "arrive, then idle" profiles are strong
      // candidates and nearly unreachable by single-segment moves
      std::size_t from = rng() % nv.size();
      for (std::size_t k = from; k < nv.size(); ++k) nv[k] = Vec::zero(spec.dim);
    } else if (dice < 0.90) {
      // jitter one segment
      auto& v = nv[static_cast<std::size_t>(rng() % nv.size())];
      for (int k = 0; k < spec.dim; ++k) v[k] += temp * gauss(rng);
      v = clamp_cap(v, cap);
    } else {
      // redraw one segment from the slow-biased distribution
      auto& v = nv[static_cast<std::size_t>(rng() % nv.size())];
      for (int k = 0; k < spec.dim; ++k) {
        double t = u(rng);
        v[k] = cap * t * t * t;
      }
      v = clamp_cap(v, cap);
    }
    double m = margin_of(ny, nv);
    double t_accept = std::max(1e-4, 0.2 * temp / cap);
    if (m < cur_margin || u01(rng) < std::exp((cur_margin - m) / t_accept)) {
      y = ny;
      cur = std::move(nv);
      cur_margin = m;
    }
    if (cur_margin < best) {
      best = cur_margin;
      best_y = y;
      best_vels = cur;
    }
  }
  rep.min_margin = best;
  rep.worst = process_from_velocities(spec, best_y, r, best_vels);
  return rep;
}

}  // namespace wkam
