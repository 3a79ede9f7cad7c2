#pragma once

// Geometry of the flat torus T^d = R^d / Z^d for d in {1, 2}:
// canonical wrapping, shortest-displacement metric, uniform periodic grids
// with multilinear interpolation.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace wkam {

// Small fixed-capacity vector for points/velocities/covectors, d <= 2.
struct Vec {
  int dim{1};
  std::array<double, 2> a{0.0, 0.0};

  Vec() = default;
  explicit Vec(double x) : dim(1), a{x, 0.0} {}
  Vec(double x, double y) : dim(2), a{x, y} {}
  static Vec zero(int d) {
    Vec v;
    v.dim = d;
    return v;
  }

  double& operator[](int i) { return a[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return a[static_cast<std::size_t>(i)]; }

  double dot(const Vec& o) const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += a[i] * o.a[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }

  Vec operator+(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < dim; ++i) r.a[i] += o.a[i];
    return r;
  }
  Vec operator-(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < dim; ++i) r.a[i] -= o.a[i];
    return r;
  }
  Vec operator*(double s) const {
    Vec r = *this;
    for (int i = 0; i < dim; ++i) r.a[i] *= s;
    return r;
  }
  Vec operator-() const { return *this * -1.0; }

  bool finite() const {
    for (int i = 0; i < dim; ++i)
      if (!std::isfinite(a[i])) return false;
    return true;
  }
};

// Point of T^d; every coordinate lies in [0, 1).
struct TorusPoint {
  int dim{1};
  std::array<double, 2> c{0.0, 0.0};

  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  Vec as_vec() const {
    Vec v;
    v.dim = dim;
    v.a = c;
    return v;
  }
};

// Canonical representative in [0,1)^d. Throws std::invalid_argument on
// non-finite input.
TorusPoint wrap(const Vec& raw);
TorusPoint wrap1(double x);
TorusPoint wrap2(double x, double y);

// Shortest displacement v with wrap(x + v) = y; per-axis component in
// (-1/2, 1/2], ties at 1/2 resolved to +1/2.
Vec min_displacement(const TorusPoint& x, const TorusPoint& y);

double torus_dist(const TorusPoint& x, const TorusPoint& y);

// Uniform grid on T^d: n nodes per axis (power of two >= 16), spacing 1/n.
struct GridSpec {
  int dim{1};
  int n{16};

  static GridSpec make(int dim, int n);
  double h() const { return 1.0 / n; }
  std::size_t num_nodes() const {
    return dim == 1 ? static_cast<std::size_t>(n)
                    : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  }
  // Lexicographic node index; for d=2 node (i0, i1) -> i0*n + i1.
  std::size_t index(int i0, int i1 = 0) const {
    return dim == 1 ? static_cast<std::size_t>(i0)
                    : static_cast<std::size_t>(i0) * n + static_cast<std::size_t>(i1);
  }
  TorusPoint node(std::size_t idx) const;
};

// Scalar field sampled at the grid nodes, lexicographic order.
struct GridScalarField {
  GridSpec grid;
  std::vector<double> values;

  static GridScalarField constant(const GridSpec& g, double c);
  template <typename F>
  static GridScalarField sample(const GridSpec& g, F&& f) {
    GridScalarField out;
    out.grid = g;
    out.values.resize(g.num_nodes());
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] = f(g.node(i));
    return out;
  }

  double at(int i0, int i1 = 0) const { return values[grid.index(i0, i1)]; }
  double min_value() const;
  double max_value() const;
  double sup_abs() const;
  // max |adjacent node difference| / h over all axes.
  double grid_lipschitz() const;
  bool finite() const;
};

// Periodic multilinear interpolation; exact at nodes.
double interpolate(const GridScalarField& field, const TorusPoint& x);

// CSV round trip: header "# d=<d> n=<n>", one value per line.
std::string field_to_csv(const GridScalarField& field);
GridScalarField field_from_csv(const std::string& csv);

}  // namespace wkam
