#pragma once

// Projected first-order methods for f(t) = Phi(t) - <c, t> and the solve
// pipeline that turns a minimizer into a transformation.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "radiso/error.hpp"
#include "radiso/model.hpp"
#include "radiso/potential.hpp"

namespace radiso {

inline constexpr double kDefaultBeta = 0.5;
/// Region bound used when no |t*|_inf bound can be computed.
inline constexpr double kFallbackRegionBound = 700.0;

enum class RegionKind { box_positive, projected_E0 };

/// box_positive: K = {t : 0 <= t_i <= bound}. projected_E0: K_0, the
/// projection of K onto the complement of the all-ones vector, which is
/// {t : sum t = 0, max t - min t <= bound}.
struct Region {
  RegionKind kind = RegionKind::box_positive;
  double bound = kFallbackRegionBound;
};

/// Euclidean projection onto the region. The projected_E0 case is exact:
/// after removing the mean, the clamp window [lo, lo + bound] is located by
/// bisection on the condition that the clamp keeps the mean at zero.
Vector project_region(const Vector& t, const Region& region);

enum class SvdTolPolicy { default_recipe, fixed };

struct DescentConfig {
  Method method = Method::smooth;
  /// Target for |c_apx - c|_2.
  double eps = 1e-6;
  int max_iters = 200'000;
  double beta = kDefaultBeta;
  /// Strong-convexity modulus; required by the strongly convex methods.
  std::optional<double> alpha;
  /// |t|_inf cap defining K. Computed from the instance when absent.
  std::optional<double> region_bound;
  SvdTolPolicy svd_tol_policy = SvdTolPolicy::default_recipe;
  double svd_tol = 0.0;
  bool record_trace = false;
  /// Skip the membership gate.
  bool force = false;
  /// Return the last iterate with a warning instead of failing when
  /// max_iters is reached.
  bool allow_max_iters = false;
  TransformProvenance transform_form = TransformProvenance::q_inv_sqrt_symmetric;
};

/// Throws Error(precondition) when an invariant of the config fails.
void validate(const DescentConfig& cfg);

/// Gradient of f used for the step (the stopping rule always uses the
/// exact SVD gradient).
using GradientProvider = std::function<Vector(const Vector& t)>;

GradientProvider svd_gradient(const VectorSet& x, const WeightVector& c);

/// Adds a deterministic pseudo-random perturbation of norm at most
/// eps^2 |g| to every gradient g returned by `inner`.
GradientProvider perturbed_gradient_wrapper(GradientProvider inner, double eps, std::uint64_t seed);

/// lambda_0 = 0, lambda_m = (1 + sqrt(1 + 4 lambda_{m-1}^2)) / 2.
double nesterov_lambda(int m);
/// gamma_m = (1 - lambda_m) / lambda_{m+1}.
double nesterov_gamma(int m);
/// (sqrt(kappa) - 1) / (sqrt(kappa) + 1).
double strongly_convex_momentum(double kappa);

class InfeasibleError : public Error {
 public:
  InfeasibleError(std::string message, PolytopeReport report)
      : Error(ErrorKind::infeasible, std::move(message)), report_(std::move(report)) {}
  const PolytopeReport& report() const { return report_; }

 private:
  PolytopeReport report_;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(std::string message, IsotropyResult best)
      : Error(ErrorKind::non_convergence, std::move(message)), best_(std::move(best)) {}
  const IsotropyResult& best() const { return best_; }

 private:
  IsotropyResult best_;
};

/// The four first-order methods. Each starts at t = 0 and stops once
/// |grad f|_2 <= eps * min(1, sqrt(min_i grad Phi_i)), which bounds the
/// isotropy residual of Q^{-1/2}(t) by eps. Returned t is min-zero.
/// Unless cfg.force is set, smooth methods require interior membership and
/// strongly convex methods additionally require an irreducible instance.
IsotropyResult smooth_gd(const VectorSet& x, const WeightVector& c, const DescentConfig& cfg);
IsotropyResult smooth_nesterov(const VectorSet& x, const WeightVector& c, const DescentConfig& cfg);
IsotropyResult strongly_convex_gd(const VectorSet& x, const WeightVector& c, const DescentConfig& cfg);
IsotropyResult strongly_convex_nesterov(const VectorSet& x, const WeightVector& c, const DescentConfig& cfg);

/// Runs cfg.method; `step_gradient` replaces the exact gradient in the
/// update when set.
IsotropyResult descend(const VectorSet& x, const WeightVector& c, const DescentConfig& cfg,
                       const GradientProvider& step_gradient = {});

/// Default region bound for an irreducible instance: deepness certificate,
/// then the general-position bound, then kFallbackRegionBound (with a
/// warning appended).
double default_region_bound(const VectorSet& x, const WeightVector& c, std::vector<std::string>& warnings);

/// Membership gate, decomposition of reducible instances, per-block
/// descent, and the final transform. Throws InfeasibleError for boundary
/// or outside c and NonConvergenceError when the residual check fails.
IsotropyResult solve(const VectorSet& x, const WeightVector& c, const DescentConfig& cfg);

}  // namespace radiso
