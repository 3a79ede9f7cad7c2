#pragma once

// Dense two-phase revised primal simplex for
//   min c.x  s.t.  A x = b,  x >= 0,
// with Bland's rule as the anti-cycling fallback. Desk-scale instances
// (few dozen rows, up to ~1e4 columns); determinism over speed.

#include <string>
#include <vector>

namespace wkam {

struct LinearProgram {
  int rows{0};
  int cols{0};
  std::vector<double> A;  // row-major, rows x cols
  std::vector<double> b;
  std::vector<double> c;

  double& at(int i, int j) { return A[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const {
    return A[static_cast<std::size_t>(i) * cols + j];
  }
};

struct SimplexResult {
  std::string status;  // "optimal" | "infeasible" | "iteration-limit"
  double value{0.0};
  std::vector<double> x;
  int iterations{0};
  double primal_residual{0.0};   // max |A x - b|
  double comp_slackness{0.0};    // max_j |x_j * reduced_cost_j|
  double dual_infeasibility{0.0};  // max(0, -min_j reduced_cost_j)
};

// max_iter <= 0 picks a generous default based on the instance size.
SimplexResult solve_simplex(const LinearProgram& lp, long long max_iter = 0);

}  // namespace wkam
