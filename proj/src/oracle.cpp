#include "radiso/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "radiso/combinatorics.hpp"
#include "radiso/error.hpp"
#include "radiso/polytope.hpp"

namespace radiso {

namespace {

constexpr int kMaxHalvings = 60;
constexpr int kMaxNewtonSteps = 200;
constexpr int kMaxScalingSteps = 2'000'000;

// Returns the irreducibility classes.
std::vector<std::vector<int>> require_relative_interior(const VectorSet& x, const WeightVector& c) {
  if (c.size() != x.count()) throw Error(ErrorKind::dimension, "weights do not match the vector count");
  if (x.count() > kMembershipMaxCount) return equivalence_classes(x).members;
  const auto report = membership(x, c);
  if (report.member != Membership::interior) {
    throw Error(ErrorKind::infeasible, std::string("c is ") + std::string(to_string(report.member)) +
                                           " of the basis polytope");
  }
  return report.classes;
}

void center_per_class(Vector& v, const std::vector<std::vector<int>>& classes) {
  for (const auto& k : classes) {
    double mean = 0.0;
    for (int i : k) mean += v[i];
    mean /= static_cast<double>(k.size());
    for (int i : k) v[i] -= mean;
  }
}

void min_zero_per_class(Vector& v, const std::vector<std::vector<int>>& classes) {
  for (const auto& k : classes) {
    double lo = v[k.front()];
    for (int i : k) lo = std::min(lo, v[i]);
    for (int i : k) v[i] -= lo;
  }
}

}  // namespace

ReferenceSolution newton_reference(const VectorSet& x, const WeightVector& c, double tol) {
  const auto classes = require_relative_interior(x, c);
  const SubsetExpansion cb(x);
  const int n = x.count();
  // f is flat along the indicator of every class.
  Matrix flat = Matrix::Zero(n, n);
  for (const auto& k : classes)
    for (int i : k)
      for (int j : k) flat(i, j) = 1.0 / static_cast<double>(k.size());

  auto f_at = [&](const Vector& t) { return cb.phi(t) - c.values().dot(t); };

  Vector t = Vector::Zero(n);
  double f = f_at(t);
  Vector g = cb.grad(t) - c.values();
  int steps = 0;
  for (; steps < kMaxNewtonSteps && g.norm() > tol; ++steps) {
    const Matrix h = cb.hessian(t) + flat;
    Vector dir = -h.ldlt().solve(g);
    center_per_class(dir, classes);

    double s = 1.0;
    bool accepted = false;
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f));
    for (int halving = 0; halving <= kMaxHalvings; ++halving, s *= 0.5) {
      const Vector trial = t + s * dir;
      const double ft = f_at(trial);
      if (ft <= f + slack) {
        const Vector gt = cb.grad(trial) - c.values();
        // Near the floating-point floor f stops moving; insist the gradient
        // still improves there.
        if (ft < f - slack || gt.norm() < g.norm()) {
          t = trial;
          f = ft;
          g = gt;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      if (g.norm() <= std::max(tol, 1e-9)) break;
      throw Error(ErrorKind::divergence, "Newton step failed to decrease f after 60 halvings");
    }
  }
  if (g.norm() > std::max(tol, 1e-9)) {
    throw Error(ErrorKind::divergence, "Newton iteration did not reach the gradient tolerance");
  }

  ReferenceSolution out;
  min_zero_per_class(t, classes);
  out.t_star = {t, Normalization::min_zero};
  out.f_star = f_at(out.t_star.entries);
  out.bases = cb.bases();
  out.lambda = cb.lambda(out.t_star.entries);
  out.newton_residual = g.norm();
  out.iterations = steps;
  return out;
}

Vector lambda_weights(const VectorSet& x, const ScalingVector& t) {
  return SubsetExpansion(x).lambda(t.entries);
}

Vector polynomial_residual(const VectorSet& x, const WeightVector& c, const ScalingVector& t) {
  return c.values() - SubsetExpansion(x).grad(t.entries);
}

double transformation_residual(const VectorSet& x, const WeightVector& c, const Transformation& t) {
  return isotropy_residual(x, c.values(), t.map());
}

EntropyCheck entropy_check(const VectorSet& z, const WeightVector& c) {
  const int d = z.dim();
  const double resid = isotropy_residual(z, c.values(), Matrix::Identity(d, d));
  if (resid > 1e-8) {
    throw Error(ErrorKind::precondition, "input is not in radial c-isotropic position (residual " +
                                             std::to_string(resid) + ")");
  }
  if (!(c.min() > 0.0)) throw Error(ErrorKind::precondition, "weights must be positive");
  EntropyCheck out;
  const Vector t = c.values().array().log().matrix();
  out.phi_star = c.values().dot(t);
  out.t_attain = {t, Normalization::raw};
  double phi_z = 0.0;
  Vector grad;
  if (binomial(z.count(), d) <= kEnumerationCap) {
    const SubsetExpansion cb(z);
    phi_z = cb.phi(t);
    grad = cb.grad(t);
  } else {
    const auto g = assemble(z, {t});
    phi_z = phi(g);
    grad = grad_phi(g);
  }
  out.value_defect = std::abs(c.values().dot(t) - phi_z - out.phi_star);
  out.gradient_defect = (grad - c.values()).cwiseAbs().maxCoeff();
  return out;
}

EntropyWeights entropy_min_weights(const VectorSet& x, const WeightVector& c, double tol) {
  const auto classes = require_relative_interior(x, c);
  const SubsetExpansion cb(x);
  const int d = x.dim();
  const Vector log_c = c.values().array().log().matrix();

  // Generalized iterative scaling: every basis has exactly d members, so
  // t_i += (log c_i - log p_i) / d decreases the dual objective.
  Vector t = Vector::Zero(x.count());
  int steps = 0;
  for (;; ++steps) {
    const Vector p = cb.grad(t);
    if ((p - c.values()).cwiseAbs().maxCoeff() <= tol) break;
    if (steps == kMaxScalingSteps) {
      throw Error(ErrorKind::non_convergence, "iterative scaling did not reach the tolerance");
    }
    t += (log_c - p.array().log().matrix()) / d;
  }
  EntropyWeights out;
  out.bases = cb.bases();
  min_zero_per_class(t, classes);
  out.multipliers = t;
  out.lambda = cb.lambda(out.multipliers);
  out.iterations = steps;
  return out;
}

}  // namespace radiso
