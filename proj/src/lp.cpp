#include "radiso/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "radiso/error.hpp"

namespace radiso {

namespace {

constexpr int kDegenerateRunBeforeBland = 50;

// Tableau rows 0..m-1 are constraints, row m is the objective row holding
// reduced costs (negative entries mark improving columns). The last column
// is the right-hand side.
class Tableau {
 public:
  Tableau(Matrix t, std::vector<int> basis) : t_(std::move(t)), basis_(std::move(basis)) {}

  int rows() const { return static_cast<int>(t_.rows()) - 1; }
  int cols() const { return static_cast<int>(t_.cols()) - 1; }
  Matrix& data() { return t_; }
  std::vector<int>& basis() { return basis_; }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i < t_.rows(); ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Returns false when the objective is unbounded over `allowed` columns.
  bool optimize(int allowed, double tol) {
    const int m = rows();
    int degenerate_run = 0;
    const long max_pivots = 50L * (cols() + m) + 1000;
    for (long step = 0; step < max_pivots; ++step) {
      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
      int enter = -1;
      double best = -tol;
      for (int j = 0; j < allowed; ++j) {
        const double rc = t_(m, j);
        if (bland) {
          if (rc < -tol) {
            enter = j;
            break;
          }
        } else if (rc < best) {
          best = rc;
          enter = j;
        }
      }
      if (enter < 0) return true;

      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double a = t_(i, enter);
        if (a <= tol) continue;
        const double q = t_(i, cols()) / a;
        if (q < ratio - tol ||
            (std::abs(q - ratio) <= tol && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          ratio = q;
          leave = i;
        }
      }
      if (leave < 0) return false;
      degenerate_run = ratio <= tol ? degenerate_run + 1 : 0;
      pivot(leave, enter);
    }
    throw Error(ErrorKind::non_convergence, "simplex exceeded its pivot budget");
  }

 private:
  Matrix t_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const Matrix& a, const Vector& b, const Vector& cost, double tol) {
  const int m = static_cast<int>(a.rows());
  const int nvar = static_cast<int>(a.cols());
  if (b.size() != m || cost.size() != nvar) throw Error(ErrorKind::dimension, "LP dimensions disagree");

  // Phase one: artificial variable per row, rows flipped so that b >= 0.
  Matrix t = Matrix::Zero(m + 1, nvar + m + 1);
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    t.row(i).head(nvar) = sign * a.row(i);
    t(i, nvar + i) = 1.0;
    t(i, nvar + m) = sign * b[i];
    basis[static_cast<std::size_t>(i)] = nvar + i;
  }
  for (int i = 0; i < m; ++i) {
    t.row(m).head(nvar) -= t.row(i).head(nvar);
    t(m, nvar + m) -= t(i, nvar + m);
  }
  Tableau tab(std::move(t), std::move(basis));
  tab.optimize(nvar, tol);

  LpResult result;
  result.infeasibility = -tab.data()(m, nvar + m);
  const double scale = 1.0 + b.cwiseAbs().maxCoeff();
  if (result.infeasibility > tol * scale * std::max(1, m)) {
    result.status = LpResult::Status::infeasible;
    return result;
  }

  // Drive remaining artificials out of the basis; rows where that is
  // impossible are redundant and dropped.
  std::vector<int> keep;
  for (int i = 0; i < m; ++i) {
    if (tab.basis()[static_cast<std::size_t>(i)] >= nvar) {
      int col = -1;
      double best = tol;
      for (int j = 0; j < nvar; ++j) {
        if (std::abs(tab.data()(i, j)) > best) {
          best = std::abs(tab.data()(i, j));
          col = j;
        }
      }
      if (col >= 0) tab.pivot(i, col);
    }
    if (tab.basis()[static_cast<std::size_t>(i)] < nvar) keep.push_back(i);
  }

  const int m2 = static_cast<int>(keep.size());
  Matrix t2 = Matrix::Zero(m2 + 1, nvar + 1);
  std::vector<int> basis2(static_cast<std::size_t>(m2));
  for (int r = 0; r < m2; ++r) {
    t2.row(r).head(nvar) = tab.data().row(keep[static_cast<std::size_t>(r)]).head(nvar);
    t2(r, nvar) = tab.data()(keep[static_cast<std::size_t>(r)], nvar + m);
    basis2[static_cast<std::size_t>(r)] = tab.basis()[static_cast<std::size_t>(keep[static_cast<std::size_t>(r)])];
  }
  t2.row(m2).head(nvar) = -cost.transpose();
  for (int r = 0; r < m2; ++r) {
    const double cb = cost[basis2[static_cast<std::size_t>(r)]];
    if (cb != 0.0) t2.row(m2) += cb * t2.row(r);
  }
  Tableau phase2(std::move(t2), std::move(basis2));
  if (!phase2.optimize(nvar, tol)) {
    result.status = LpResult::Status::unbounded;
    return result;
  }

  result.status = LpResult::Status::optimal;
  result.x = Vector::Zero(nvar);
  for (int r = 0; r < m2; ++r) result.x[phase2.basis()[static_cast<std::size_t>(r)]] = phase2.data()(r, nvar);
  result.objective = cost.dot(result.x);

  // B^T y = c_B on the kept rows of the original system.
  Matrix basis_cols(m2, m2);
  Vector cb(m2);
  for (int r = 0; r < m2; ++r) {
    const int col = phase2.basis()[static_cast<std::size_t>(r)];
    cb[r] = cost[col];
    for (int k = 0; k < m2; ++k) basis_cols(k, r) = a(keep[static_cast<std::size_t>(k)], col);
  }
  const Vector y_keep = basis_cols.transpose().partialPivLu().solve(cb);
  result.duals = Vector::Zero(m);
  for (int k = 0; k < m2; ++k) result.duals[keep[static_cast<std::size_t>(k)]] = y_keep[k];
  return result;
}

}  // namespace radiso
