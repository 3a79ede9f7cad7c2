#include "wkam/cell_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace wkam {

namespace {

struct Stencil1 {
  int base;      // node offset
  double frac;   // interpolation weight
  double cost;   // dt * kinetic(v)
};

// precomputed per-velocity data for one step; valid for fixed (grid, dt, box)
std::vector<Stencil1> build_stencils_1d(const GridSpec& grid, double dt,
                                        const LagrangianSpec& spec,
                                        const VelocityBox& box) {
  const int n = grid.n;
  std::vector<Stencil1> st;
  st.reserve(box.per_axis + 1);
  for (int j = 0; j <= box.per_axis; ++j) {
    Vec v = Vec::zero(1);
    v[0] = -box.radius + j * box.spacing();
    double f = dt * v[0] * n;
    double fl = std::floor(f);
    Stencil1 s;
    s.base = ((static_cast<int>(fl) % n) + n) % n;
    s.frac = f - fl;
    s.cost = dt * spec.kinetic(v);
    st.push_back(s);
  }
  return st;
}

void step_1d(const std::vector<double>& in, std::vector<double>& out,
             const std::vector<Stencil1>& st, const std::vector<double>& vpot,
             double dt, int n) {
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : st) {
      int k = i + s.base;
      if (k >= n) k -= n;
      int k1 = k + 1;
      if (k1 >= n) k1 -= n;
      double val = (1.0 - s.frac) * in[k] + s.frac * in[k1] + s.cost;
      if (val < best) best = val;
    }
    out[i] = best - dt * vpot[i];
  }
}

struct Stencil2 {
  int b0, b1;
  double f0, f1;
  double cost;
};

std::vector<Stencil2> build_stencils_2d(const GridSpec& grid, double dt,
                                        const LagrangianSpec& spec,
                                        const VelocityBox& box) {
  const int n = grid.n;
  std::vector<Stencil2> st;
  for (int j0 = 0; j0 <= box.per_axis; ++j0)
    for (int j1 = 0; j1 <= box.per_axis; ++j1) {
      Vec v = Vec::zero(2);
      v[0] = -box.radius + j0 * box.spacing();
      v[1] = -box.radius + j1 * box.spacing();
      Stencil2 s;
      double f0 = dt * v[0] * n, f1 = dt * v[1] * n;
      double fl0 = std::floor(f0), fl1 = std::floor(f1);
      s.b0 = ((static_cast<int>(fl0) % n) + n) % n;
      s.b1 = ((static_cast<int>(fl1) % n) + n) % n;
      s.f0 = f0 - fl0;
      s.f1 = f1 - fl1;
      s.cost = dt * spec.kinetic(v);
      st.push_back(s);
    }
  return st;
}

void step_2d(const std::vector<double>& in, std::vector<double>& out,
             const std::vector<Stencil2>& st, const std::vector<double>& vpot,
             double dt, int n) {
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& s : st) {
        int k0 = i0 + s.b0;
        if (k0 >= n) k0 -= n;
        int k1 = i1 + s.b1;
        if (k1 >= n) k1 -= n;
        int k0n = k0 + 1 == n ? 0 : k0 + 1;
        int k1n = k1 + 1 == n ? 0 : k1 + 1;
        std::size_t r0 = static_cast<std::size_t>(k0) * n;
        std::size_t r0n = static_cast<std::size_t>(k0n) * n;
        double val = (1.0 - s.f0) * ((1.0 - s.f1) * in[r0 + k1] + s.f1 * in[r0 + k1n]) +
                     s.f0 * ((1.0 - s.f1) * in[r0n + k1] + s.f1 * in[r0n + k1n]) +
                     s.cost;
        if (val < best) best = val;
      }
      out[static_cast<std::size_t>(i0) * n + i1] = best - dt * vpot[static_cast<std::size_t>(i0) * n + i1];
    }
}

std::vector<double> sample_potential(const GridSpec& grid,
                                     const LagrangianSpec& spec) {
  std::vector<double> v(grid.num_nodes());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = spec.eval_V(grid.node(i));
  return v;
}

void check_step_pre(double dt, const VelocityBox& box) {
  if (!(dt > 0.0)) throw std::invalid_argument("lax_oleinik_step: dt <= 0");
  if (dt * box.radius > 0.25 + 1e-12)
    throw std::invalid_argument("lax_oleinik_step: dt * radius > 1/4");
}

}  // namespace

GridScalarField lax_oleinik_step(const GridScalarField& phi, double dt,
                                 const LagrangianSpec& spec,
                                 const VelocityBox& box) {
  check_step_pre(dt, box);
  GridScalarField out;
  out.grid = phi.grid;
  out.values.resize(phi.values.size());
  auto vpot = sample_potential(phi.grid, spec);
  if (phi.grid.dim == 1) {
    auto st = build_stencils_1d(phi.grid, dt, spec, box);
    step_1d(phi.values, out.values, st, vpot, dt, phi.grid.n);
  } else {
    auto st = build_stencils_2d(phi.grid, dt, spec, box);
    step_2d(phi.values, out.values, st, vpot, dt, phi.grid.n);
  }
  return out;
}

CellSolution solve_cell(const LagrangianSpec& spec, const GridSpec& grid,
                        double dt, double tol, int max_iter,
                        const VelocityBox& box) {
  check_step_pre(dt, box);
  if (!(tol > 0.0)) throw std::invalid_argument("solve_cell: tol <= 0");

  auto vpot = sample_potential(grid, spec);
  std::vector<double> cur(grid.num_nodes(), 0.0), next(grid.num_nodes());

  auto st1 = grid.dim == 1 ? build_stencils_1d(grid, dt, spec, box)
                           : std::vector<Stencil1>{};
  auto st2 = grid.dim == 2 ? build_stencils_2d(grid, dt, spec, box)
                           : std::vector<Stencil2>{};

  double smax = 0.0, smin = 0.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    if (grid.dim == 1)
      step_1d(cur, next, st1, vpot, dt, grid.n);
    else
      step_2d(cur, next, st2, vpot, dt, grid.n);
    smax = -std::numeric_limits<double>::infinity();
    smin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cur.size(); ++i) {
      double d = next[i] - cur[i];
      smax = std::max(smax, d);
      smin = std::min(smin, d);
    }
    cur.swap(next);
    if (smax - smin < tol * dt) break;
  }
  double residual = (smax - smin) / dt;
  if (it >= max_iter)
    throw ConvergenceFailure("solve_cell: max_iter exceeded, residual " +
                                 std::to_string(residual),
                             residual);

  CellSolution sol;
  sol.phi.grid = grid;
  sol.phi.values = std::move(cur);
  double mn = *std::min_element(sol.phi.values.begin(), sol.phi.values.end());
  for (auto& v : sol.phi.values) v -= mn;
  sol.hbar = -(smax + smin) / (2.0 * dt);
  sol.residual_sup = residual;
  sol.iterations = it + 1;
  sol.dt = dt;
  return sol;
}

double solution_lipschitz_bound(const LagrangianSpec& spec) {
  // kinetic^*(t) = max_u [t u - kinetic along the cheapest axis direction]
  Vec e = Vec::zero(spec.dim);
  int ax = 0;
  if (spec.family == Family::AnisotropicKink && spec.dim == 2 &&
      spec.lambdas[1] < spec.lambdas[0])
    ax = 1;
  auto conj = [&](double t) {
    double hi = spec.growth_radius(t) + 1.0;
    double best = 0.0;
    for (int i = 0; i <= 400; ++i) {
      double u = hi * i / 400.0;
      Vec v = e;
      v[ax] = u;
      best = std::max(best, t * u - spec.kinetic(v));
    }
    return best;
  };
  double target = 2.0 * spec.potential_sup();
  double lo = 0.0, hi = 1.0;
  while (conj(hi) < target) hi *= 2.0;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    (conj(mid) < target ? lo : hi) = mid;
  }
  return hi + 1.0;  // slack for discretization
}

VelocityBox default_cell_box(const LagrangianSpec& spec) {
  VelocityBox box;
  box.radius = velocity_bound(spec, solution_lipschitz_bound(spec));
  // keep the lattice spacing near 1/64 regardless of the radius
  box.per_axis = std::max(64, static_cast<int>(std::ceil(box.radius * 128)));
  return box;
}

double default_cell_dt(const GridSpec& grid, const VelocityBox& box) {
  // CFL step h / C3: the fastest lattice velocity crosses at most one cell
  // per step, and the O(dt) scheme bias stays below the O(h) profile error
  return grid.h() / box.radius;
}

CellSolution solve_cell(const LagrangianSpec& spec, const GridSpec& grid,
                        double tol, int max_iter) {
  VelocityBox box = default_cell_box(spec);
  return solve_cell(spec, grid, default_cell_dt(grid, box), tol, max_iter, box);
}

double viscosity_residual(const CellSolution& sol, const LagrangianSpec& spec,
                          const VelocityBox& box) {
  const GridScalarField& phi = sol.phi;
  const int n = phi.grid.n;
  const double h = phi.grid.h();
  const std::size_t m = phi.grid.num_nodes();

  std::vector<double> jump(m, 0.0);
  std::vector<Vec> grad(m, Vec::zero(phi.grid.dim));
  if (phi.grid.dim == 1) {
    for (int i = 0; i < n; ++i) {
      double fm = phi.at((i - 1 + n) % n), f0 = phi.at(i), fp = phi.at((i + 1) % n);
      grad[i][0] = (fp - fm) / (2.0 * h);
      jump[i] = std::fabs((fp - f0) / h - (f0 - fm) / h);
    }
  } else {
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1) {
        std::size_t idx = phi.grid.index(i0, i1);
        double fm0 = phi.at((i0 - 1 + n) % n, i1), fp0 = phi.at((i0 + 1) % n, i1);
        double fm1 = phi.at(i0, (i1 - 1 + n) % n), fp1 = phi.at(i0, (i1 + 1) % n);
        double f0 = phi.at(i0, i1);
        grad[idx][0] = (fp0 - fm0) / (2.0 * h);
        grad[idx][1] = (fp1 - fm1) / (2.0 * h);
        jump[idx] = std::max(std::fabs((fp0 - f0) / h - (f0 - fm0) / h),
                             std::fabs((fp1 - f0) / h - (f0 - fm1) / h));
      }
  }

  std::vector<double> sorted = jump;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  double median = sorted[sorted.size() / 2];
  double cutoff = 3.0 * std::max(median, 1e-12);

  double sup = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (jump[i] > cutoff) continue;  // kink set
    double hval = hamiltonian(spec, phi.grid.node(i), -grad[i], box);
    sup = std::max(sup, std::fabs(hval - sol.hbar));
  }
  return sup;
}

}  // namespace wkam
