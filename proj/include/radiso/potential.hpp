#pragma once

// The convex potential Phi(t) = log det(sum_i e^{t_i} x_i x_i^T), the
// objective f(t) = Phi(t) - <c, t> and their derivatives.
//
// Two independent evaluation paths exist. The production path goes through
// the SVD of X(t)^T (rows e^{t_i/2} x_i^T): grad Phi is the vector of squared
// row norms of U and the Hessian is built from inner products of those rows.
// The oracle path expands det Q(t) over all d-subsets (Cauchy-Binet) and is
// only usable while C(n, d) stays below kEnumerationCap.

#include <cstdint>
#include <span>
#include <vector>

#include "radiso/model.hpp"

namespace radiso {

inline constexpr std::uint64_t kEnumerationCap = 200'000;
/// Base tolerance for SVD-derived identities; callers scale it by n or d.
inline constexpr double kFroTol = 1e-9;
/// Largest allowed max(t) - min(t) before exp(t) would overflow.
inline constexpr double kMaxLogSpread = 700.0;

/// SVD of X(t)^T, stored with the common factor exp(max_i t_i / 2) pulled
/// out so that large |t| never overflows.
struct WeightedGram {
  ScalingVector t;
  /// Q(t) = exp(log_scale) * q_scaled.
  double log_scale = 0.0;
  Matrix q_scaled;
  /// n x d, orthonormal columns; row j is u_j.
  Matrix u;
  /// Descending singular values of X(t)^T divided by exp(log_scale / 2).
  Vector sigma_scaled;
  /// d x d right singular vectors.
  Matrix v;
  double svd_tol = 0.0;

  Matrix q() const;
  Vector singular_values() const;
};

using HessianMatrix = Matrix;

/// Throws Error(range) when max(t) - min(t) exceeds kMaxLogSpread.
WeightedGram assemble(const VectorSet& x, const ScalingVector& t, double svd_tol = 0.0);

/// log det Q(t) = 2 sum_k log sigma_k. Throws Error(singular).
double phi(const WeightedGram& g);
double f_value(const WeightedGram& g, const WeightVector& c);
/// (|u_1|^2, ..., |u_n|^2).
Vector grad_phi(const WeightedGram& g);
Vector grad_f(const WeightedGram& g, const WeightVector& c);
/// H_jj = |u_j|^2 - |u_j|^4, H_jk = -<u_j, u_k>^2.
HessianMatrix hessian(const WeightedGram& g);
/// Largest eigenvalue magnitude of H.
double spectral_bound_check(const HessianMatrix& h);
/// Smallest eigenvalue of H restricted to the complement of the all-ones
/// vector.
double min_eigenvalue_on_e0(const HessianMatrix& h);

/// Symmetric Q^{-1/2}(t) = V Sigma^{-1} V^T, at true scale.
Matrix q_inv_sqrt_symmetric(const WeightedGram& g);
/// Sigma^{-1} V^T, at true scale.
Matrix q_inv_sqrt_svd(const WeightedGram& g);

/// A d-subset of X whose vectors are linearly independent, with
/// delta = det^2 of the corresponding d x d submatrix.
struct Basis {
  std::vector<int> indices;
  double delta = 0.0;
  double log_delta = 0.0;
};

/// All bases in lexicographic order. A subset counts as a basis when
/// |det| >= 1e-10 times the product of its column norms. Throws Error(cap)
/// when C(n, d) > kEnumerationCap.
std::vector<Basis> subset_determinants(const VectorSet& x);

/// Cauchy-Binet evaluation of Phi and its derivatives over a fixed list of
/// bases. All sums are log-sum-exp stabilized and reduced in basis order.
class SubsetExpansion {
 public:
  explicit SubsetExpansion(const VectorSet& x);
  SubsetExpansion(int n, int d, std::vector<Basis> bases);

  int count() const { return n_; }
  int dim() const { return d_; }
  const std::vector<Basis>& bases() const { return bases_; }

  double phi(const Vector& t) const;
  /// lambda_S = e^{t_S} Delta_S / sum_S' e^{t_S'} Delta_S', in basis order.
  Vector lambda(const Vector& t) const;
  Vector grad(const Vector& t) const;
  /// sum_S lambda_S 1_S 1_S^T - p p^T with p = grad(t).
  Matrix hessian(const Vector& t) const;

 private:
  Vector log_terms(const Vector& t) const;

  int n_ = 0;
  int d_ = 0;
  std::vector<Basis> bases_;
};

double phi_cauchy_binet(const VectorSet& x, const ScalingVector& t);
Vector grad_phi_subsets(const VectorSet& x, const ScalingVector& t);

}  // namespace radiso
