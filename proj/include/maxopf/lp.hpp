#pragma once

#include <vector>

namespace maxopf {

/// max c·x  s.t.  A x <= b,  0 <= x <= upper.
struct LinearProgram {
  std::vector<double> c;
  std::vector<std::vector<double>> a;  ///< dense rows, each of size c.size()
  std::vector<double> b;
  std::vector<double> upper;           ///< per variable, finite
};

struct LpResult {
  std::vector<double> x;
  double objective = 0.0;
  int pivots = 0;
};

/// Bounded-variable primal simplex started from the all-slack basis. Requires
/// b >= -tol (x = 0 feasible); throws InfeasibleRelaxation otherwise.
LpResult solve_lp(const LinearProgram& lp, double tol = 1e-9);

}  // namespace maxopf
