#include "wkam/torus.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace wkam {

namespace {

double wrap_coord(double x) {
  double w = x - std::floor(x);
  // floor can leave exactly 1.0 for tiny negative inputs
  if (w >= 1.0) w -= 1.0;
  if (w < 0.0) w += 1.0;
  return w;
}

// Per-axis signed displacement from cx to cy in (-1/2, 1/2], tie -> +1/2.
double axis_displacement(double cx, double cy) {
  double d = wrap_coord(cy - cx);  // in [0,1)
  if (d > 0.5) d -= 1.0;
  return d;
}

}  // namespace

TorusPoint wrap(const Vec& raw) {
  if (!raw.finite()) throw std::invalid_argument("wrap: non-finite input");
  TorusPoint p;
  p.dim = raw.dim;
  for (int i = 0; i < raw.dim; ++i) p.c[i] = wrap_coord(raw[i]);
  return p;
}

TorusPoint wrap1(double x) { return wrap(Vec(x)); }
TorusPoint wrap2(double x, double y) { return wrap(Vec(x, y)); }

Vec min_displacement(const TorusPoint& x, const TorusPoint& y) {
  Vec v = Vec::zero(x.dim);
  for (int i = 0; i < x.dim; ++i) v[i] = axis_displacement(x[i], y[i]);
  return v;
}

double torus_dist(const TorusPoint& x, const TorusPoint& y) {
  return min_displacement(x, y).norm();
}

GridSpec GridSpec::make(int dim, int n) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("GridSpec: dim must be 1 or 2");
  if (n < 16 || (n & (n - 1)) != 0)
    throw std::invalid_argument("GridSpec: n must be a power of two >= 16");
  GridSpec g;
  g.dim = dim;
  g.n = n;
  return g;
}

TorusPoint GridSpec::node(std::size_t idx) const {
  TorusPoint p;
  p.dim = dim;
  if (dim == 1) {
    p.c[0] = static_cast<double>(idx) * h();
  } else {
    p.c[0] = static_cast<double>(idx / n) * h();
    p.c[1] = static_cast<double>(idx % n) * h();
  }
  return p;
}

GridScalarField GridScalarField::constant(const GridSpec& g, double c) {
  GridScalarField f;
  f.grid = g;
  f.values.assign(g.num_nodes(), c);
  return f;
}

double GridScalarField::min_value() const {
  double m = values[0];
  for (double v : values) m = std::min(m, v);
  return m;
}

double GridScalarField::max_value() const {
  double m = values[0];
  for (double v : values) m = std::max(m, v);
  return m;
}

double GridScalarField::sup_abs() const {
  return std::max(std::fabs(min_value()), std::fabs(max_value()));
}

double GridScalarField::grid_lipschitz() const {
  const int n = grid.n;
  double m = 0.0;
  if (grid.dim == 1) {
    for (int i = 0; i < n; ++i)
      m = std::max(m, std::fabs(at((i + 1) % n) - at(i)));
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        m = std::max(m, std::fabs(at((i + 1) % n, j) - at(i, j)));
        m = std::max(m, std::fabs(at(i, (j + 1) % n) - at(i, j)));
      }
  }
  return m / grid.h();
}

bool GridScalarField::finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

double interpolate(const GridScalarField& field, const TorusPoint& x) {
  const int n = field.grid.n;
  if (field.grid.dim == 1) {
    double t = x[0] * n;
    int i = static_cast<int>(t);
    if (i >= n) i = n - 1;  // x[0] < 1 but t*n may round to n
    double a = t - i;
    return (1.0 - a) * field.at(i) + a * field.at((i + 1) % n);
  }
  double t0 = x[0] * n, t1 = x[1] * n;
  int i0 = static_cast<int>(t0), i1 = static_cast<int>(t1);
  if (i0 >= n) i0 = n - 1;
  if (i1 >= n) i1 = n - 1;
  double a0 = t0 - i0, a1 = t1 - i1;
  int j0 = (i0 + 1) % n, j1 = (i1 + 1) % n;
  return (1.0 - a0) * ((1.0 - a1) * field.at(i0, i1) + a1 * field.at(i0, j1)) +
         a0 * ((1.0 - a1) * field.at(j0, i1) + a1 * field.at(j0, j1));
}

std::string field_to_csv(const GridScalarField& field) {
  std::string out = "# d=" + std::to_string(field.grid.dim) +
                    " n=" + std::to_string(field.grid.n) + "\n";
  char buf[40];
  for (double v : field.values) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out += buf;
  }
  return out;
}

GridScalarField field_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  int d = 0, n = 0;
  if (std::sscanf(header.c_str(), "# d=%d n=%d", &d, &n) != 2)
    throw std::invalid_argument("field_from_csv: bad header");
  GridScalarField f;
  f.grid = GridSpec::make(d, n);
  f.values.reserve(f.grid.num_nodes());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    f.values.push_back(std::stod(line));
  }
  if (f.values.size() != f.grid.num_nodes())
    throw std::invalid_argument("field_from_csv: wrong value count");
  return f;
}

}  // namespace wkam
