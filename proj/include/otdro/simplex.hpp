#pragma once

#include <vector>

namespace otdro {

// Dense primal simplex for maximize c^T x s.t. A x = b, x >= 0, started from
// a caller-supplied basic feasible basis.  Bland's rule throughout, so the
// method cannot cycle.  Sized for the tiny instances the oracle produces.
struct SimplexResult {
  enum class Status { Optimal, Unbounded, IterationLimit };
  Status status = Status::Optimal;
  double value = 0.0;
  std::vector<double> x;
  int iterations = 0;
};

SimplexResult simplex_max(const std::vector<std::vector<double>>& A,
                          const std::vector<double>& b, const std::vector<double>& c,
                          std::vector<int> basis, double tol = 1e-9, int max_iter = 20000);

}  // namespace otdro
