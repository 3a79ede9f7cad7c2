#include "wkam/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace wkam {

namespace {

constexpr double kTol = 1e-9;

// Revised primal simplex on the sign-normalized data (rows scaled so that
// b >= 0), with the basis refactorized from the original matrix at every
// iteration. On the heavily degenerate instances this module feeds the LP
// (most right-hand sides are exactly zero), a long-lived dense tableau
// accumulates enough round-off to drift below the true optimum and then
// wander; rebuilding B^{-1} each step keeps the error per-iteration only.
// Entering rule: Dantzig (most negative reduced cost, lowest index on
// ties) while the objective moves; after a streak of degenerate pivots,
// Bland (lowest eligible index) takes over to rule out cycling. Both
// rules are deterministic.
struct Solver {
  int m, n;                   // constraint rows, structural columns
  int total;                  // n + m (structural + artificial)
  std::vector<double> A;      // m x n, row-scaled
  std::vector<double> b;      // >= 0
  std::vector<int> basis;     // basis[i] = column basic in row i
  std::vector<char> in_basis;  // per column, kept in sync with basis
  // scratch
  std::vector<double> lu;     // m x m factors
  std::vector<int> perm;
  std::vector<double> xb, y, w, cost;

  double a_at(int i, int j) const {
    // column j of the working matrix: structural or artificial unit column
    return j < n ? A[static_cast<std::size_t>(i) * n + j] : (j - n == i ? 1.0 : 0.0);
  }

  // LU with partial pivoting of the current basis matrix.
  void factor() {
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k)
        lu[static_cast<std::size_t>(i) * m + k] = a_at(i, basis[k]);
    for (int k = 0; k < m; ++k) {
      int p = k;
      for (int i = k + 1; i < m; ++i)
        if (std::fabs(lu[static_cast<std::size_t>(i) * m + k]) >
            std::fabs(lu[static_cast<std::size_t>(p) * m + k]))
          p = i;
      perm[k] = p;
      if (p != k)
        for (int j = 0; j < m; ++j)
          std::swap(lu[static_cast<std::size_t>(k) * m + j],
                    lu[static_cast<std::size_t>(p) * m + j]);
      double piv = lu[static_cast<std::size_t>(k) * m + k];
      if (std::fabs(piv) < 1e-12)
        throw std::runtime_error("solve_simplex: singular basis");
      for (int i = k + 1; i < m; ++i) {
        double f = lu[static_cast<std::size_t>(i) * m + k] / piv;
        lu[static_cast<std::size_t>(i) * m + k] = f;
        if (f == 0.0) continue;
        for (int j = k + 1; j < m; ++j)
          lu[static_cast<std::size_t>(i) * m + j] -=
              f * lu[static_cast<std::size_t>(k) * m + j];
      }
    }
  }

  // solve B z = rhs in place: z = U^{-1} L^{-1} P rhs
  void solve_fwd(std::vector<double>& z) const {
    for (int k = 0; k < m; ++k)
      if (perm[k] != k) std::swap(z[k], z[perm[k]]);
    for (int k = 0; k < m; ++k)
      for (int i = k + 1; i < m; ++i)
        z[i] -= lu[static_cast<std::size_t>(i) * m + k] * z[k];
    for (int k = m - 1; k >= 0; --k) {
      z[k] /= lu[static_cast<std::size_t>(k) * m + k];
      for (int i = 0; i < k; ++i)
        z[i] -= lu[static_cast<std::size_t>(i) * m + k] * z[k];
    }
  }

  // solve B^T z = rhs in place: z = P^T L^{-T} U^{-T} rhs
  void solve_trans(std::vector<double>& z) const {
    for (int k = 0; k < m; ++k) {
      for (int i = 0; i < k; ++i)
        z[k] -= lu[static_cast<std::size_t>(i) * m + k] * z[i];
      z[k] /= lu[static_cast<std::size_t>(k) * m + k];
    }
    for (int k = m - 1; k >= 0; --k)
      for (int i = k + 1; i < m; ++i)
        z[k] -= lu[static_cast<std::size_t>(i) * m + k] * z[i];
    for (int k = m - 1; k >= 0; --k)
      if (perm[k] != k) std::swap(z[k], z[perm[k]]);
  }

  double reduced_cost(int j) const {
    double d = cost[j];
    if (j < n) {
      for (int i = 0; i < m; ++i)
        d -= y[i] * A[static_cast<std::size_t>(i) * n + j];
    } else {
      d -= y[j - n];
    }
    return d;
  }

  // Minimize `cost` over columns [0, max_col); returns iterations used, or
  // -1 on the iteration limit.
  long long run(int max_col, long long max_iter) {
    long long it = 0;
    int degenerate_streak = 0;
    while (it < max_iter) {
      factor();
      xb = b;
      solve_fwd(xb);
      for (int i = 0; i < m; ++i) y[i] = cost[basis[i]];
      solve_trans(y);

      const bool bland = degenerate_streak >= 30;
      int pc = -1;
      double most = -kTol;
      for (int j = 0; j < max_col; ++j) {
        if (in_basis[j]) continue;  // basic reduced costs are round-off only
        double d = reduced_cost(j);
        if (d < most) {
          pc = j;
          if (bland) break;
          most = d;
        }
      }
      if (pc < 0) return it;

      for (int i = 0; i < m; ++i) w[i] = a_at(i, pc);
      solve_fwd(w);
      int pr = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i) {
        if (w[i] > kTol) {
          double ratio = std::max(0.0, xb[i]) / w[i];
          if (pr < 0 || ratio < best - kTol) {
            pr = i;
            best = ratio;
          } else if (ratio < best + kTol) {
            // near-tie: Bland needs the lowest basis index; otherwise take
            // the largest pivot for stability, index as final tie-break
            bool take = bland ? basis[i] < basis[pr]
                              : (w[i] > w[pr] + kTol ||
                                 (w[i] > w[pr] - kTol && basis[i] < basis[pr]));
            if (take) {
              pr = i;
              if (ratio < best) best = ratio;
            }
          }
        }
      }
      if (pr < 0)
        throw std::runtime_error("solve_simplex: unbounded direction");
      if (best > kTol)
        degenerate_streak = 0;
      else
        ++degenerate_streak;
      in_basis[basis[pr]] = 0;
      in_basis[pc] = 1;
      basis[pr] = pc;
      ++it;
    }
    return -1;
  }
};

}  // namespace

SimplexResult solve_simplex(const LinearProgram& lp, long long max_iter) {
  if (lp.rows <= 0 || lp.cols <= 0 ||
      lp.A.size() != static_cast<std::size_t>(lp.rows) * lp.cols ||
      lp.b.size() != static_cast<std::size_t>(lp.rows) ||
      lp.c.size() != static_cast<std::size_t>(lp.cols))
    throw std::invalid_argument("solve_simplex: inconsistent dimensions");
  const int m = lp.rows, n = lp.cols;
  if (max_iter <= 0)
    max_iter = 2000LL * (m + 1) + 150LL * n;

  Solver s;
  s.m = m;
  s.n = n;
  s.total = n + m;
  s.A.resize(static_cast<std::size_t>(m) * n);
  s.b.resize(m);
  s.basis.resize(m);
  s.lu.resize(static_cast<std::size_t>(m) * m);
  s.perm.resize(m);
  s.xb.resize(m);
  s.y.resize(m);
  s.w.resize(m);
  for (int i = 0; i < m; ++i) {
    double sgn = lp.b[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) s.A[static_cast<std::size_t>(i) * n + j] = sgn * lp.at(i, j);
    s.b[i] = sgn * lp.b[i];
    s.basis[i] = n + i;
  }
  s.in_basis.assign(static_cast<std::size_t>(s.total), 0);
  for (int i = 0; i < m; ++i) s.in_basis[s.basis[i]] = 1;

  SimplexResult res;

  // phase 1: minimize the sum of artificials
  s.cost.assign(static_cast<std::size_t>(s.total), 0.0);
  for (int j = n; j < s.total; ++j) s.cost[j] = 1.0;
  long long it1 = s.run(s.total, max_iter);
  if (it1 < 0) {
    res.status = "iteration-limit";
    return res;
  }
  s.factor();
  s.xb = s.b;
  s.solve_fwd(s.xb);
  double phase1 = 0.0;
  for (int i = 0; i < m; ++i)
    if (s.basis[i] >= n) phase1 += s.xb[i];
  if (phase1 > 1e-7) {
    res.status = "infeasible";
    res.iterations = static_cast<int>(it1);
    return res;
  }
  // drive remaining artificials out of the basis where a structural pivot
  // exists; a row without one is redundant and keeps its artificial at 0
  for (int i = 0; i < m; ++i) {
    if (s.basis[i] < n) continue;
    s.factor();
    for (int j = 0; j < n; ++j) {
      if (s.in_basis[j]) continue;
      for (int k = 0; k < m; ++k) s.w[k] = s.a_at(k, j);
      s.solve_fwd(s.w);
      if (std::fabs(s.w[i]) > 1e-7) {
        s.in_basis[s.basis[i]] = 0;
        s.in_basis[j] = 1;
        s.basis[i] = j;
        break;
      }
    }
  }

  // phase 2: the original objective; artificials stay priced at 0 and may
  // not re-enter (max_col = n)
  s.cost.assign(static_cast<std::size_t>(s.total), 0.0);
  for (int j = 0; j < n; ++j) s.cost[j] = lp.c[j];
  long long it2 = s.run(n, max_iter - it1);
  if (it2 < 0) {
    res.status = "iteration-limit";
    return res;
  }
  res.iterations = static_cast<int>(it1 + it2);

  s.factor();
  s.xb = s.b;
  s.solve_fwd(s.xb);
  res.x.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < m; ++i)
    if (s.basis[i] < n) res.x[s.basis[i]] = std::max(0.0, s.xb[i]);
  double value = 0.0;
  for (int j = 0; j < n; ++j) value += lp.c[j] * res.x[j];
  res.value = value;

  for (int i = 0; i < m; ++i) {
    double ax = 0.0;
    for (int j = 0; j < n; ++j) ax += lp.at(i, j) * res.x[j];
    res.primal_residual = std::max(res.primal_residual, std::fabs(ax - lp.b[i]));
  }
  for (int i = 0; i < m; ++i) s.y[i] = s.cost[s.basis[i]];
  s.solve_trans(s.y);
  for (int j = 0; j < n; ++j) {
    double rc = s.reduced_cost(j);
    res.comp_slackness = std::max(res.comp_slackness, std::fabs(res.x[j] * rc));
    res.dual_infeasibility = std::max(res.dual_infeasibility, -rc);
  }
  res.status = "optimal";
  return res;
}

}  // namespace wkam
