#include "wkam/mather.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "wkam/envelope.hpp"

namespace wkam {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_lattice(const LagrangianSpec& spec, const VelocityBox& vbox) {
  if (vbox.per_axis < 2 || vbox.per_axis % 2 != 0)
    throw std::invalid_argument("velocity lattice: per_axis must be even and >= 2");
  if (!(vbox.radius > 0.0))
    throw std::invalid_argument("velocity lattice: empty (radius <= 0)");
  if (vbox.radius < spec.growth_radius(1.0))
    throw std::invalid_argument(
        "velocity lattice: radius below the superlinearity ball growth_radius(1)");
}

int nearest_axis_bin(double v, const VelocityBox& vbox) {
  double t = (v + vbox.radius) / vbox.spacing();
  int j = static_cast<int>(std::lround(t));
  if (j < 0) j = 0;
  if (j > vbox.per_axis) j = vbox.per_axis;
  return j;
}

std::size_t nearest_x_bin(const TorusPoint& x, const GridSpec& g) {
  int i0 = static_cast<int>(std::lround(x[0] * g.n)) % g.n;
  if (g.dim == 1) return static_cast<std::size_t>(i0);
  int i1 = static_cast<int>(std::lround(x[1] * g.n)) % g.n;
  return g.index(i0, i1);
}

double mode_dot_x(const std::array<int, 2>& k, const TorusPoint& x, int dim) {
  double s = k[0] * x[0];
  if (dim == 2) s += k[1] * x[1];
  return s;
}

double mode_dot_v(const std::array<int, 2>& k, const Vec& v, int dim) {
  double s = k[0] * v[0];
  if (dim == 2) s += k[1] * v[1];
  return s;
}

}  // namespace

std::size_t DiscreteMeasure::num_v() const {
  std::size_t per = static_cast<std::size_t>(vbox.per_axis) + 1;
  return xgrid.dim == 1 ? per : per * per;
}

Vec DiscreteMeasure::v_node(std::size_t j) const {
  std::size_t per = static_cast<std::size_t>(vbox.per_axis) + 1;
  Vec v = Vec::zero(xgrid.dim);
  if (xgrid.dim == 1) {
    v[0] = -vbox.radius + static_cast<double>(j) * vbox.spacing();
  } else {
    v[0] = -vbox.radius + static_cast<double>(j / per) * vbox.spacing();
    v[1] = -vbox.radius + static_cast<double>(j % per) * vbox.spacing();
  }
  return v;
}

double DiscreteMeasure::total() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

HolonomyBasis HolonomyBasis::make(int dim, int M) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("HolonomyBasis: dim");
  if (M < 0) throw std::invalid_argument("HolonomyBasis: M < 0");
  HolonomyBasis b;
  b.dim = dim;
  b.M = M;
  if (dim == 1) {
    for (int k = 1; k <= M; ++k) b.modes.push_back({k, 0});
  } else {
    // one representative per +/-k pair: k0 > 0, or k0 = 0 and k1 > 0
    for (int k0 = 0; k0 <= M; ++k0)
      for (int k1 = -M; k1 <= M; ++k1) {
        if (k0 == 0 && k1 <= 0) continue;
        b.modes.push_back({k0, k1});
      }
  }
  return b;
}

LinearProgram build_lp(const LagrangianSpec& spec, const GridSpec& xgrid,
                       const VelocityBox& vbox, const HolonomyBasis& basis) {
  check_lattice(spec, vbox);
  if (basis.dim != xgrid.dim) throw std::invalid_argument("build_lp: dim mismatch");

  DiscreteMeasure shape;
  shape.xgrid = xgrid;
  shape.vbox = vbox;
  const std::size_t nx = xgrid.num_nodes();
  const std::size_t nv = shape.num_v();

  LinearProgram lp;
  lp.rows = basis.rows() + 1;
  lp.cols = static_cast<int>(nx * nv);
  lp.A.assign(static_cast<std::size_t>(lp.rows) * lp.cols, 0.0);
  lp.b.assign(static_cast<std::size_t>(lp.rows), 0.0);
  lp.c.resize(static_cast<std::size_t>(lp.cols));
  lp.b[lp.rows - 1] = 1.0;

  std::vector<Vec> vs(nv);
  for (std::size_t j = 0; j < nv; ++j) vs[j] = shape.v_node(j);

  for (std::size_t i = 0; i < nx; ++i) {
    TorusPoint x = xgrid.node(i);
    for (std::size_t j = 0; j < nv; ++j) {
      std::size_t col = i * nv + j;
      lp.c[col] = eval_L(spec, x, vs[j]);
      for (std::size_t mrow = 0; mrow < basis.modes.size(); ++mrow) {
        const auto& k = basis.modes[mrow];
        double theta = kTwoPi * mode_dot_x(k, x, xgrid.dim);
        double kv = kTwoPi * mode_dot_v(k, vs[j], xgrid.dim);
        // test functions cos(2 pi k.x) and sin(2 pi k.x):
        //   grad cos . v = -2 pi (k.v) sin,  grad sin . v = 2 pi (k.v) cos
        lp.at(static_cast<int>(2 * mrow), static_cast<int>(col)) =
            -kv * std::sin(theta);
        lp.at(static_cast<int>(2 * mrow + 1), static_cast<int>(col)) =
            kv * std::cos(theta);
      }
      lp.at(lp.rows - 1, static_cast<int>(col)) = 1.0;
    }
  }
  return lp;
}

MatherSolution solve_mather_lp(const LagrangianSpec& spec, const GridSpec& xgrid,
                               const VelocityBox& vbox, const HolonomyBasis& basis,
                               long long max_iter) {
  LinearProgram lp = build_lp(spec, xgrid, vbox, basis);
  MatherSolution sol;
  sol.lp = solve_simplex(lp, max_iter);
  if (sol.lp.status != "optimal")
    throw std::runtime_error("solve_mather_lp: simplex " + sol.lp.status);
  sol.value = sol.lp.value;
  sol.measure.xgrid = xgrid;
  sol.measure.vbox = vbox;
  sol.measure.weights = sol.lp.x;
  return sol;
}

DiscreteMeasure occupation_measure(const ControlledProcess& proc,
                                   const GridSpec& xgrid, const VelocityBox& vbox) {
  if (static_cast<long long>(proc.samples.size()) != proc.steps + 1)
    throw std::invalid_argument(
        "occupation_measure: process trace is incomplete; bin during the run");
  OccupationBinner bin(xgrid, vbox);
  if (proc.r == 0.0) {
    bin.add(proc.start, Vec::zero(proc.start.dim), 1.0);
    return bin.finish();
  }
  const double half_cell = 0.5 * xgrid.h();
  for (std::size_t i = 0; i + 1 < proc.samples.size(); ++i) {
    const ProcessSample& s = proc.samples[i];
    double dur = proc.samples[i + 1].t - s.t;
    int parts = 1 + static_cast<int>(std::floor(s.v.norm() * dur / half_cell));
    double sub = dur / parts;
    for (int q = 0; q < parts; ++q) {
      double tmid = (q + 0.5) * sub;
      bin.add(wrap(s.x.as_vec() + s.v * tmid), s.v, sub);
    }
  }
  return bin.finish();
}

OccupationBinner::OccupationBinner(const GridSpec& xgrid, const VelocityBox& vbox) {
  if (vbox.per_axis < 2 || vbox.per_axis % 2 != 0)
    throw std::invalid_argument("OccupationBinner: per_axis must be even and >= 2");
  acc_.xgrid = xgrid;
  acc_.vbox = vbox;
  acc_.weights.assign(xgrid.num_nodes() * acc_.num_v(), 0.0);
}

void OccupationBinner::add(const TorusPoint& x, const Vec& v, double duration) {
  std::size_t xi = nearest_x_bin(x, acc_.xgrid);
  std::size_t per = static_cast<std::size_t>(acc_.vbox.per_axis) + 1;
  std::size_t vj = static_cast<std::size_t>(nearest_axis_bin(v[0], acc_.vbox));
  if (acc_.xgrid.dim == 2)
    vj = vj * per + static_cast<std::size_t>(nearest_axis_bin(v[1], acc_.vbox));
  acc_.weights[xi * acc_.num_v() + vj] += duration;
  total_time_ += duration;
}

DiscreteMeasure OccupationBinner::finish() const {
  if (!(total_time_ > 0.0))
    throw std::logic_error("OccupationBinner: nothing accumulated");
  DiscreteMeasure out = acc_;
  for (double& w : out.weights) w /= total_time_;
  return out;
}

double measure_integral_L(const DiscreteMeasure& m, const LagrangianSpec& spec) {
  const std::size_t nv = m.num_v();
  double acc = 0.0;
  for (std::size_t i = 0; i < m.xgrid.num_nodes(); ++i) {
    TorusPoint x = m.xgrid.node(i);
    for (std::size_t j = 0; j < nv; ++j) {
      double w = m.weights[i * nv + j];
      if (w != 0.0) acc += w * eval_L(spec, x, m.v_node(j));
    }
  }
  return acc;
}

double holonomy_residual(const DiscreteMeasure& m, const HolonomyBasis& basis) {
  const std::size_t nv = m.num_v();
  double worst = 0.0;
  for (const auto& k : basis.modes) {
    double rc = 0.0, rs = 0.0;
    for (std::size_t i = 0; i < m.xgrid.num_nodes(); ++i) {
      TorusPoint x = m.xgrid.node(i);
      double theta = kTwoPi * mode_dot_x(k, x, m.xgrid.dim);
      double sn = std::sin(theta), cs = std::cos(theta);
      for (std::size_t j = 0; j < nv; ++j) {
        double w = m.weights[i * nv + j];
        if (w == 0.0) continue;
        double kv = kTwoPi * mode_dot_v(k, m.v_node(j), m.xgrid.dim);
        rc += w * (-kv * sn);
        rs += w * (kv * cs);
      }
    }
    worst = std::max(worst, std::max(std::fabs(rc), std::fabs(rs)));
  }
  return worst;
}

double subsolution_residual_mollified(const GridScalarField& phi, double delta,
                                      double hbar, const LagrangianSpec& spec,
                                      const VelocityBox& box) {
  GridScalarField pm = mollify(phi, delta);
  const int n = pm.grid.n;
  const double h = pm.grid.h();
  const double omega = modulus(spec, box.radius, delta);
  double worst = 0.0;
  auto wrap_i = [n](int i) { return ((i % n) + n) % n; };
  for (std::size_t idx = 0; idx < pm.grid.num_nodes(); ++idx) {
    TorusPoint x = pm.grid.node(idx);
    Vec g = Vec::zero(pm.grid.dim);
    if (pm.grid.dim == 1) {
      int i = static_cast<int>(idx);
      g[0] = (pm.values[wrap_i(i + 1)] - pm.values[wrap_i(i - 1)]) / (2.0 * h);
    } else {
      int i0 = static_cast<int>(idx) / n, i1 = static_cast<int>(idx) % n;
      g[0] = (pm.at(wrap_i(i0 + 1), i1) - pm.at(wrap_i(i0 - 1), i1)) / (2.0 * h);
      g[1] = (pm.at(i0, wrap_i(i1 + 1)) - pm.at(i0, wrap_i(i1 - 1))) / (2.0 * h);
    }
    double H = hamiltonian(spec, x, -g, box);
    worst = std::max(worst, H - hbar - omega);
  }
  return std::max(0.0, worst);
}

std::string measure_to_csv(const DiscreteMeasure& m) {
  std::string out = m.xgrid.dim == 1 ? "x0,v0,weight\n" : "x0,x1,v0,v1,weight\n";
  char buf[160];
  const std::size_t nv = m.num_v();
  for (std::size_t i = 0; i < m.xgrid.num_nodes(); ++i) {
    TorusPoint x = m.xgrid.node(i);
    for (std::size_t j = 0; j < nv; ++j) {
      double w = m.weights[i * nv + j];
      if (w < 1e-12) continue;
      Vec v = m.v_node(j);
      if (m.xgrid.dim == 1)
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", x[0], v[0], w);
      else
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", x[0],
                      x[1], v[0], v[1], w);
      out += buf;
    }
  }
  return out;
}

}  // namespace wkam
