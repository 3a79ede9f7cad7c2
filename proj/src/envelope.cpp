#include "wkam/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wkam {

namespace {

constexpr double kTie = 1e-10;

struct Candidate {
  double value{0.0};
  Vec b;
  bool set{false};
};

void consider(Candidate& best, double value, const Vec& b) {
  if (!best.set) {
    best = {value, b, true};
    return;
  }
  if (value < best.value - kTie) {
    best = {value, b, true};
    return;
  }
  if (value > best.value + kTie) return;
  double nb = b.norm2(), nbest = best.b.norm2();
  if (nb < nbest - kTie) {
    best = {value, b, true};
    return;
  }
  if (nb > nbest + kTie) return;
  for (int i = 0; i < b.dim; ++i) {
    if (b[i] < best.b[i] - kTie) {
      best = {value, b, true};
      return;
    }
    if (b[i] > best.b[i] + kTie) return;
  }
}

// minimize sign*phi(x+w) + |w|^2/(2 kappa^2) over |w|_inf <= half per axis
Candidate minimize_signed(const GridScalarField& phi, double sign, double kappa,
                          const TorusPoint& x, double half) {
  const int n = phi.grid.n;
  const double h = phi.grid.h();
  const double q = 0.5 / (kappa * kappa);
  Candidate best;

  auto node = [&](int i) { return sign * phi.values[((i % n) + n) % n]; };

  if (phi.grid.dim == 1) {
    const double sx = x[0];
    int j_lo = static_cast<int>(std::floor((sx - half) / h));
    int j_hi = static_cast<int>(std::floor((sx + half) / h));
    for (int j = j_lo; j <= j_hi; ++j) {
      double v0 = node(j), v1 = node(j + 1);
      double slope = (v1 - v0) / h;
      double w_lo = std::max(j * h - sx, -half);
      double w_hi = std::min((j + 1) * h - sx, half);
      if (w_lo > w_hi) continue;
      double wstar = std::clamp(-slope * kappa * kappa, w_lo, w_hi);
      for (double w : {wstar, w_lo, w_hi}) {
        double s = sx + w;
        double g = v0 + slope * (s - j * h) + q * w * w;
        Vec b = Vec::zero(1);
        b[0] = w;
        consider(best, g, b);
      }
    }
    return best;
  }

  // d = 2: per cell the interpolant is a + b0 w0 + b1 w1 + c w0 w1 in local
  // offsets from the cell's low corner; add the quadratic and minimize over
  // the cell rectangle intersected with the search box.
  const double sx0 = x[0], sx1 = x[1];
  auto node2 = [&](int i, int j) {
    return sign * phi.values[static_cast<std::size_t>(((i % n) + n) % n) * n +
                             ((j % n) + n) % n];
  };
  int lo0 = static_cast<int>(std::floor((sx0 - half) / h));
  int hi0 = static_cast<int>(std::floor((sx0 + half) / h));
  int lo1 = static_cast<int>(std::floor((sx1 - half) / h));
  int hi1 = static_cast<int>(std::floor((sx1 + half) / h));
  for (int j0 = lo0; j0 <= hi0; ++j0) {
    double w0_lo = std::max(j0 * h - sx0, -half);
    double w0_hi = std::min((j0 + 1) * h - sx0, half);
    if (w0_lo > w0_hi) continue;
    for (int j1 = lo1; j1 <= hi1; ++j1) {
      double w1_lo = std::max(j1 * h - sx1, -half);
      double w1_hi = std::min((j1 + 1) * h - sx1, half);
      if (w1_lo > w1_hi) continue;

      double f00 = node2(j0, j1), f10 = node2(j0 + 1, j1);
      double f01 = node2(j0, j1 + 1), f11 = node2(j0 + 1, j1 + 1);
      // local coordinates u = (s - cell corner), s = x + w
      double d0 = sx0 - j0 * h, d1 = sx1 - j1 * h;  // offset of x in cell
      double g0 = (f10 - f00) / h;
      double g1 = (f01 - f00) / h;
      double cc = (f11 - f10 - f01 + f00) / (h * h);

      auto eval = [&](double w0, double w1) {
        double u0 = d0 + w0, u1 = d1 + w1;
        double lin = f00 + g0 * u0 + g1 * u1 + cc * u0 * u1;
        return lin + q * (w0 * w0 + w1 * w1);
      };
      auto push = [&](double w0, double w1) {
        Vec b = Vec::zero(2);
        b[0] = w0;
        b[1] = w1;
        consider(best, eval(w0, w1), b);
      };

      // stationary point of the cell quadratic (Hessian [[2q, cc],[cc, 2q]])
      double det = 4.0 * q * q - cc * cc;
      if (det > 0.0) {
        // gradient: 2q w0 + g0 + cc (d1 + w1) = 0 and symmetric
        double r0 = -(g0 + cc * d1);
        double r1 = -(g1 + cc * d0);
        double w0 = (2.0 * q * r0 - cc * r1) / det;
        double w1 = (2.0 * q * r1 - cc * r0) / det;
        if (w0 >= w0_lo && w0 <= w0_hi && w1 >= w1_lo && w1 <= w1_hi)
          push(w0, w1);
      }
      // edges: 1-D quadratic with positive curvature 2q along each axis
      for (double w1 : {w1_lo, w1_hi}) {
        double w0 = std::clamp(-(g0 + cc * (d1 + w1)) * kappa * kappa, w0_lo, w0_hi);
        push(w0, w1);
      }
      for (double w0 : {w0_lo, w0_hi}) {
        double w1 = std::clamp(-(g1 + cc * (d0 + w0)) * kappa * kappa, w1_lo, w1_hi);
        push(w0, w1);
      }
      push(w0_lo, w1_lo);
      push(w0_lo, w1_hi);
      push(w0_hi, w1_lo);
      push(w0_hi, w1_hi);
    }
  }
  return best;
}

EnvelopeResult envelope_impl(const GridScalarField& phi, double kappa,
                             const TorusPoint& x, double sign,
                             double sup_bound) {
  if (!(kappa > 0.0)) throw std::invalid_argument("envelope: kappa <= 0");
  if (!(sup_bound >= 0.0))
    throw std::invalid_argument("envelope: non-finite field or bad sup bound");
  double radius = std::sqrt(2.0 * sup_bound) * kappa;
  double half = std::min(radius, 0.5);
  Candidate c = minimize_signed(phi, sign, kappa, x, half);
  EnvelopeResult r;
  r.kappa = kappa;
  r.b = c.b;
  r.value = sign * c.value;
  r.p = c.b * (sign * -1.0 / (kappa * kappa));
  return r;
}

}  // namespace

EnvelopeResult lower_envelope(const GridScalarField& phi, double kappa,
                              const TorusPoint& x) {
  return envelope_impl(phi, kappa, x, +1.0, phi.sup_abs());
}

EnvelopeResult upper_envelope(const GridScalarField& phi, double kappa,
                              const TorusPoint& x) {
  return envelope_impl(phi, kappa, x, -1.0, phi.sup_abs());
}

EnvelopeResult lower_envelope(const GridScalarField& phi, double kappa,
                              const TorusPoint& x, double sup_bound) {
  return envelope_impl(phi, kappa, x, +1.0, sup_bound);
}

EnvelopeResult upper_envelope(const GridScalarField& phi, double kappa,
                              const TorusPoint& x, double sup_bound) {
  return envelope_impl(phi, kappa, x, -1.0, sup_bound);
}

GridScalarField mollify(const GridScalarField& phi, double delta) {
  if (!(delta > 0.0) || !(delta < 0.25))
    throw std::invalid_argument("mollify: delta must lie in (0, 1/4)");
  const int n = phi.grid.n;
  const double h = phi.grid.h();
  const int rad = static_cast<int>(std::floor(delta / h));

  auto bump = [](double t2) {  // t2 = |w/delta|^2 < 1
    return std::exp(-1.0 / (1.0 - t2));
  };

  GridScalarField out;
  out.grid = phi.grid;
  out.values.assign(phi.values.size(), 0.0);

  if (phi.grid.dim == 1) {
    std::vector<double> w(2 * rad + 1);
    double sum = 0.0;
    for (int j = -rad; j <= rad; ++j) {
      double t = j * h / delta;
      w[j + rad] = (t * t < 1.0) ? bump(t * t) : 0.0;
      sum += w[j + rad];
    }
    for (auto& x : w) x /= sum;
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = -rad; j <= rad; ++j)
        s += w[j + rad] * phi.values[((i + j) % n + n) % n];
      out.values[i] = s;
    }
  } else {
    const int side = 2 * rad + 1;
    std::vector<double> w(static_cast<std::size_t>(side) * side);
    double sum = 0.0;
    for (int j0 = -rad; j0 <= rad; ++j0)
      for (int j1 = -rad; j1 <= rad; ++j1) {
        double t2 = (j0 * (double)j0 + j1 * (double)j1) * h * h / (delta * delta);
        double ww = (t2 < 1.0) ? bump(t2) : 0.0;
        w[static_cast<std::size_t>(j0 + rad) * side + (j1 + rad)] = ww;
        sum += ww;
      }
    for (auto& x : w) x /= sum;
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1) {
        double s = 0.0;
        for (int j0 = -rad; j0 <= rad; ++j0)
          for (int j1 = -rad; j1 <= rad; ++j1)
            s += w[static_cast<std::size_t>(j0 + rad) * side + (j1 + rad)] *
                 phi.at(((i0 + j0) % n + n) % n, ((i1 + j1) % n + n) % n);
        out.values[phi.grid.index(i0, i1)] = s;
      }
  }
  return out;
}

double envelope_c1(double K, double c0) {
  return std::sqrt(2.0 * K * std::sqrt(2.0 * c0));
}

double envelope_c2(double K, double c0) {
  double c1 = envelope_c1(K, c0);
  return K * std::sqrt(2.0 * c0) + 0.5 * c1 * c1;
}

}  // namespace wkam
