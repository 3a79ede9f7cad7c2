#include "wkam/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace wkam {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kValueTie = 1e-9;

double golden_max(double lo, double hi, const auto& f, double tol) {
  constexpr double invphi = 0.6180339887498948482;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

// true if candidate (fv, v) beats the incumbent under value-then-smallest-
// norm-then-lexicographic ordering
bool better(double fv, const Vec& v, double fbest, const Vec& vbest) {
  if (fv > fbest + kValueTie) return true;
  if (fv < fbest - kValueTie) return false;
  double nv = v.norm2(), nb = vbest.norm2();
  if (nv < nb - kValueTie) return true;
  if (nv > nb + kValueTie) return false;
  for (int i = 0; i < v.dim; ++i) {
    if (v[i] < vbest[i] - kValueTie) return true;
    if (v[i] > vbest[i] + kValueTie) return false;
  }
  return false;
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::Mechanical: return "mechanical";
    case Family::Kinked: return "kinked";
    case Family::AnisotropicKink: return "anisotropic-kink";
    case Family::PiecewisePower: return "piecewise-power";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "mechanical") return Family::Mechanical;
  if (name == "kinked") return Family::Kinked;
  if (name == "anisotropic-kink") return Family::AnisotropicKink;
  if (name == "piecewise-power") return Family::PiecewisePower;
  throw std::invalid_argument("unknown Lagrangian family: " + name);
}

double LagrangianSpec::eval_V(const TorusPoint& x) const {
  double s = 0.0;
  for (const auto& m : potential) {
    double phase = m.k[0] * x[0];
    if (dim == 2) phase += m.k[1] * x[1];
    s += m.a * std::cos(kTwoPi * phase);
  }
  return s;
}

double LagrangianSpec::kinetic(const Vec& v) const {
  double n2 = v.norm2();
  switch (family) {
    case Family::Mechanical:
      return 0.5 * n2;
    case Family::Kinked:
      return 0.5 * n2 + lambda * std::sqrt(n2);
    case Family::AnisotropicKink: {
      double s = 0.5 * n2;
      for (int i = 0; i < dim; ++i) s += lambdas[i] * std::fabs(v[i]);
      return s;
    }
    case Family::PiecewisePower: {
      double n = std::sqrt(n2);
      return std::max(n * std::sqrt(n), 0.5 * n2);
    }
  }
  return 0.0;
}

double LagrangianSpec::potential_sup() const {
  double s = 0.0;
  for (const auto& m : potential) s += std::fabs(m.a);
  return s;
}

double LagrangianSpec::potential_lip() const {
  double s = 0.0;
  for (const auto& m : potential) {
    double kn = std::sqrt(double(m.k[0]) * m.k[0] + double(m.k[1]) * m.k[1]);
    s += std::fabs(m.a) * kTwoPi * kn;
  }
  return s;
}

double LagrangianSpec::growth_radius(double m) const {
  // Solve 0.5 c^2 - mu c - sup|V| = 0 with mu the slope after the kink
  // term absorbs what it can; works for every built-in since each kinetic
  // dominates 0.5|v|^2 plus its kink part.
  const double sup_v = potential_sup();
  double mu = m;
  if (family == Family::Kinked) mu = std::max(m - lambda, 0.0);
  if (family == Family::AnisotropicKink) {
    double lmin = lambdas[0];
    if (dim == 2) lmin = std::min(lmin, lambdas[1]);
    mu = std::max(m - lmin, 0.0);
  }
  return mu + std::sqrt(mu * mu + 2.0 * sup_v);
}

double eval_L(const LagrangianSpec& spec, const TorusPoint& x, const Vec& v) {
  if (!v.finite()) throw std::invalid_argument("eval_L: non-finite velocity");
  return spec.kinetic(v) - spec.eval_V(x);
}

double velocity_bound(const LagrangianSpec& spec, double K) {
  if (K < 0.0) throw std::invalid_argument("velocity_bound: K < 0");
  return std::max(spec.growth_radius(K + spec.c1_prime() + 1.0), 1.0);
}

namespace {

// shared lattice-scan + golden refinement core; returns argmax of
// p.v - kinetic(v) over the box
Vec conjugate_argmax(const LagrangianSpec& spec, const Vec& p,
                     const VelocityBox& box) {
  const double required = velocity_bound(spec, p.norm());
  if (box.radius + 1e-12 < required)
    throw std::invalid_argument(
        "velocity box too small: radius " + std::to_string(box.radius) +
        " < required " + std::to_string(required));

  const int d = p.dim;
  const double hv = box.spacing();
  auto f = [&](const Vec& v) { return p.dot(v) - spec.kinetic(v); };

  Vec best = Vec::zero(d);
  double fbest = f(best);
  Vec v = Vec::zero(d);
  if (d == 1) {
    for (int i = 0; i <= box.per_axis; ++i) {
      v[0] = -box.radius + i * hv;
      double fv = f(v);
      if (better(fv, v, fbest, best)) {
        fbest = fv;
        best = v;
      }
    }
  } else {
    for (int i = 0; i <= box.per_axis; ++i) {
      v[0] = -box.radius + i * hv;
      for (int j = 0; j <= box.per_axis; ++j) {
        v[1] = -box.radius + j * hv;
        double fv = f(v);
        if (better(fv, v, fbest, best)) {
          fbest = fv;
          best = v;
        }
      }
    }
  }

  // one refinement pass: per-axis golden section around the lattice argmax
  for (int pass = 0; pass < (d == 1 ? 1 : 2); ++pass) {
    for (int ax = 0; ax < d; ++ax) {
      Vec probe = best;
      auto f1 = [&](double t) {
        probe[ax] = t;
        return f(probe);
      };
      double lo = std::max(best[ax] - hv, -box.radius);
      double hi = std::min(best[ax] + hv, box.radius);
      double t = golden_max(lo, hi, f1, 1e-8);
      probe[ax] = t;
      double fv = f(probe);
      if (fv > fbest) {
        fbest = fv;
        best = probe;
      }
    }
  }

  // snap near-zero components; keeps the smallest-norm tie rule exact at
  // kinks where the refinement stops within its tolerance of 0
  Vec snapped = best;
  bool changed = false;
  for (int i = 0; i < d; ++i)
    if (snapped[i] != 0.0 && std::fabs(snapped[i]) < 1e-6) {
      snapped[i] = 0.0;
      changed = true;
    }
  if (changed && f(snapped) >= fbest - kValueTie) best = snapped;
  return best;
}

}  // namespace

double hamiltonian(const LagrangianSpec& spec, const TorusPoint& x, const Vec& p,
                   const VelocityBox& box) {
  Vec v = conjugate_argmax(spec, p, box);
  return p.dot(v) - spec.kinetic(v) + spec.eval_V(x);
}

Vec argmax_velocity(const LagrangianSpec& spec, const TorusPoint& x, const Vec& p,
                    const VelocityBox& box) {
  (void)x;  // maximizer of p.v - L(x,v) does not depend on x for L = K(v) - V(x)
  return conjugate_argmax(spec, p, box);
}

double modulus(const LagrangianSpec& spec, double A, double delta) {
  (void)A;
  if (delta < 0.0) throw std::invalid_argument("modulus: delta < 0");
  return std::min(spec.potential_lip() * delta, 2.0 * spec.potential_sup());
}

LagrangianSpec LagrangianSpec::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  LagrangianSpec s;
  s.family = family_from_name(j.at("family").get<std::string>());
  s.dim = j.value("dim", 1);
  if (s.dim != 1 && s.dim != 2)
    throw std::invalid_argument("LagrangianSpec: dim must be 1 or 2");
  s.lambda = j.value("lambda", 0.0);
  if (j.contains("lambdas")) {
    auto l = j["lambdas"];
    for (std::size_t i = 0; i < l.size() && i < 2; ++i)
      s.lambdas[i] = l[i].get<double>();
  }
  if (j.contains("potential")) {
    for (const auto& c : j["potential"].value("cos_coeffs", nlohmann::json::array())) {
      CosineMode m;
      if (c.at(0).is_array()) {
        m.k[0] = c[0][0].get<int>();
        m.k[1] = c[0][1].get<int>();
      } else {
        m.k[0] = c[0].get<int>();
      }
      m.a = c.at(1).get<double>();
      s.potential.push_back(m);
    }
  }
  return s;
}

std::string LagrangianSpec::to_json_text() const {
  nlohmann::json j;
  j["family"] = family_name(family);
  j["dim"] = dim;
  if (family == Family::Kinked) j["lambda"] = lambda;
  if (family == Family::AnisotropicKink)
    j["lambdas"] = dim == 1 ? nlohmann::json{lambdas[0]}
                            : nlohmann::json{lambdas[0], lambdas[1]};
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& m : potential) {
    if (dim == 1)
      coeffs.push_back({m.k[0], m.a});
    else
      coeffs.push_back({{m.k[0], m.k[1]}, m.a});
  }
  j["potential"] = {{"cos_coeffs", coeffs}};
  return j.dump();
}

}  // namespace wkam
