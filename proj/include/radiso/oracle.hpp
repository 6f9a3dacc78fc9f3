#pragma once

// Reference computations that share no numerical kernel with the SVD
// path: everything here expands Phi over enumerated bases.

#include <vector>

#include "radiso/model.hpp"
#include "radiso/potential.hpp"

namespace radiso {

struct ReferenceSolution {
  /// Minimizer, min-zero within each irreducibility class.
  ScalingVector t_star;
  double f_star = 0.0;
  /// Bases in lexicographic order and lambda_S(t*) aligned with them.
  std::vector<Basis> bases;
  Vector lambda;
  /// |grad f(t*)|_2 at exit.
  double newton_residual = 0.0;
  int iterations = 0;
};

/// Damped Newton on f restricted to the complement of 1, with the exact
/// Cauchy-Binet Hessian. Requires interior c (checked when
/// n <= kMembershipMaxCount) and C(n, d) <= kEnumerationCap. On reducible X
/// f is flat along each class indicator; every class is fixed to min zero.
/// Throws Error(divergence) after 60 halvings without decrease.
ReferenceSolution newton_reference(const VectorSet& x, const WeightVector& c, double tol = 1e-12);

/// lambda_S(t) in enumerate_bases order.
Vector lambda_weights(const VectorSet& x, const ScalingVector& t);

/// r_i = c_i - sum_{S ni i} Delta_S zeta^S / sum_S Delta_S zeta^S with
/// zeta = e^t.
Vector polynomial_residual(const VectorSet& x, const WeightVector& c, const ScalingVector& t);

/// |sum_i c_i z_i z_i^T - I|_F for z_i = T x_i / |T x_i|.
double transformation_residual(const VectorSet& x, const WeightVector& c, const Transformation& t);

struct EntropyCheck {
  /// sum_i c_i log c_i.
  double phi_star = 0.0;
  /// t_i = log c_i.
  ScalingVector t_attain;
  /// |<t, c> - Phi_Z(t) - phi_star|.
  double value_defect = 0.0;
  /// |grad Phi_Z(t) - c|_inf.
  double gradient_defect = 0.0;
};

/// For Z already in radial c-isotropic position. Throws
/// Error(precondition) when transformation_residual(Z, c, I) > 1e-8.
EntropyCheck entropy_check(const VectorSet& z, const WeightVector& c);

struct EntropyWeights {
  std::vector<Basis> bases;
  Vector lambda;
  /// Multipliers t with lambda = lambda_weights(t), min-zero per class.
  Vector multipliers;
  int iterations = 0;
};

/// argmin sum_S lambda_S log(lambda_S / Delta_S) subject to
/// sum_{S ni i} lambda_S = c_i, by generalized iterative scaling. Throws
/// Error(infeasible) when c is not in the relative interior.
EntropyWeights entropy_min_weights(const VectorSet& x, const WeightVector& c, double tol = 1e-12);

}  // namespace radiso
