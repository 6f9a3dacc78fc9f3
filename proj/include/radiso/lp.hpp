#pragma once

#include "radiso/model.hpp"

namespace radiso {

struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  Vector x;
  double objective = 0.0;
  /// Phase-one infeasibility (sum of artificial variables at its optimum).
  double infeasibility = 0.0;
  /// Optimal dual y with a^T y >= cost on every column; zero on rows found
  /// redundant. Only set when status is optimal.
  Vector duals;
};

/// Dense two-phase simplex for: maximize cost^T x s.t. a x = b, x >= 0.
/// Dantzig pricing with smallest-index tie breaks; falls back to Bland's
/// rule after a run of degenerate pivots. Fully deterministic.
LpResult solve_lp(const Matrix& a, const Vector& b, const Vector& cost, double tol = 1e-10);

}  // namespace radiso
