#pragma once

// Feasibility and conditioning: membership of c in the basis polytope K_X,
// the irreducibility classes of X, problem decomposition, and numeric
// evaluation of the |t*|_inf and strong-convexity bounds.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radiso/model.hpp"
#include "radiso/potential.hpp"

namespace radiso {

/// Largest n for the exhaustive halfspace check (2^n subsets).
inline constexpr int kMembershipMaxCount = 20;
/// Halfspace slack below kBoundaryTol * d counts as equality.
inline constexpr double kBoundaryTol = 1e-9;
/// Gram-Schmidt residual below which a vector is taken to lie in a span.
inline constexpr double kSpanTol = 1e-10;

/// All bases of X with their Delta_S, lexicographic. Throws Error(cap).
std::vector<Basis> enumerate_bases(const VectorSet& x);

/// Exhaustive check of the halfspace description
/// sum_{i in J} c_i <= dim span{x_i : i in J} over all subsets J. Boundary
/// means some J is tight without splitting R^d into a direct sum; witness
/// indices are 0-based. Throws Error(cap) when n > kMembershipMaxCount.
PolytopeReport membership(const VectorSet& x, const WeightVector& c);

/// Convex-combination test over enumerated bases: maximizes the smallest
/// lambda_S subject to sum_S lambda_S 1_S = c, sum_S lambda_S = 1. The
/// report carries classes but no witness.
PolytopeReport membership_lp(const VectorSet& x, const WeightVector& c);

struct EquivalenceClasses {
  /// Sorted members, classes ordered by smallest member.
  std::vector<std::vector<int>> members;
  /// dim span of each class; these add up to d.
  std::vector<int> dims;
};

EquivalenceClasses equivalence_classes(const VectorSet& x);

/// Same partition without enumerating bases: the fundamental circuits of
/// one greedy basis, merged by union-find. Needs only n d rank tests.
EquivalenceClasses circuit_classes(const VectorSet& x);

struct SubInstance {
  std::vector<int> indices;
  /// d x d_j orthonormal basis of the class span after the pre-map.
  Matrix frame;
  VectorSet vectors;
  WeightVector weights;
};

struct Decomposition {
  /// Applied to X before splitting. Identity for irreducible X, otherwise
  /// (sum_i c_i x_i x_i^T)^{-1/2}.
  Matrix pre_map;
  std::vector<SubInstance> parts;
};

/// Throws Error(infeasible) when a class sum differs from the class
/// dimension by more than kSumTol, or when the mapped class spans are not
/// mutually orthogonal.
Decomposition decompose(const VectorSet& x, const WeightVector& c);
Decomposition decompose(const VectorSet& x, const WeightVector& c, const EquivalenceClasses& classes);

/// {2^-1, ..., 2^-20}.
std::vector<double> default_delta_grid();

struct DeepnessProbe {
  /// min over candidates of 1 - (sum_{x_j in E_delta} c_j) / dim E; not
  /// clamped, so negative values mean a candidate is violated.
  double eta = 1.0;
  std::vector<int> worst_case;
  std::uint64_t checked_subspaces = 0;
};

struct DeepnessCertificate {
  double eta = 1.0;
  double delta = 0.5;
  std::uint64_t checked_subspaces = 0;
  /// Spanning index set of the candidate with the least slack.
  std::vector<int> worst_case;
  /// The candidate family is finite, so the certificate is not a proof of
  /// deepness over every subspace.
  bool heuristic = true;
  double t_inf = 0.0;
};

/// Candidate subspaces: spans of independent subsets of size 1..d-1 and,
/// for each subset of size k+1 <= d, its top-k principal subspace. Throws
/// Error(cap) when there are more than kEnumerationCap candidates.
DeepnessProbe deepness_eta(const VectorSet& x, const WeightVector& c, double delta);

/// Picks the grid point minimizing t_inf_bound among those with eta > 0.
/// Throws Error(degenerate) when no grid point certifies.
DeepnessCertificate deepness_estimate(const VectorSet& x, const WeightVector& c,
                                      std::span<const double> delta_grid);
DeepnessCertificate deepness_estimate(const VectorSet& x, const WeightVector& c);

/// log(1/c_min) + (d-1) log(8 / (eta delta^2)).
double t_inf_bound(double c_min, double eta, double delta, int d);
double t_inf_bound(const WeightVector& c, double eta, double delta, int d);

/// R_0 = (1/gamma) log(sum_S Delta_S / min_S Delta_S).
double hm_bound(const VectorSet& x, double gamma);
double hm_bound(std::span<const Basis> bases, double gamma);

/// c_min / d. Throws Error(precondition) unless every d-subset is a basis,
/// n > d, and max c <= 1 - c_min / d.
double gamma_general_position(const WeightVector& c, const VectorSet& x);
double gamma_general_position(const WeightVector& c, int d, std::span<const Basis> bases, int n);

struct HmDeepness {
  double eta = 0.0;
  double delta = 0.0;
  /// log(1/(gamma d)) + (d-1) log(32 d^2 / (gamma Delta_min)).
  double t_inf = 0.0;
};

HmDeepness hm_to_deepness(double gamma, double delta_s_min, int d);

struct AlphaBounds {
  double alpha_general = 0.0;
  double log_alpha_general = 0.0;
  std::optional<double> alpha_gp;
  double kappa_general = 0.0;
  std::optional<double> kappa_gp;
};

/// Both strong-convexity lower bounds evaluated at |t|_inf = t_inf, with
/// kappa = beta / alpha and beta = 1/2. The general-position variant is
/// present only when delta_s_min is given and n > d. eta is accepted for
/// symmetry with the certificate but does not enter either formula.
AlphaBounds alpha_bounds(int n, int d, double eta, double delta, double t_inf,
                         std::optional<double> delta_s_min);
AlphaBounds alpha_bounds(const VectorSet& x, double eta, double delta, double t_inf,
                         std::optional<double> delta_s_min);

struct XiEstimate {
  double value = 0.0;
  bool exact = false;
  std::uint64_t partitions = 0;
  /// sigma^+ of the minimizing bipartition.
  std::vector<int> minimizer;
};

/// min over bipartitions of sum_{i in sigma-} sum_{j in sigma+} <u_i, u_j>^2.
/// Exhaustive when 2^{n-1} <= 2^kMembershipMaxCount, otherwise every
/// singleton split plus `samples` random ones drawn from `seed`.
XiEstimate xi_estimate(const WeightedGram& g, std::uint64_t samples = 100'000, std::uint64_t seed = 1);

struct BoundReport {
  double beta = 0.5;
  double c_min = 0.0;
  std::optional<DeepnessCertificate> deepness;
  std::optional<double> t_inf_new;
  std::optional<double> gamma;
  std::optional<double> delta_s_min;
  std::optional<double> t_inf_hm;
  std::optional<HmDeepness> hm_deepness;
  /// The point at which the alpha bounds were evaluated.
  std::optional<double> t_inf_used;
  std::optional<AlphaBounds> alpha;
  std::vector<std::string> notes;
};

/// Evaluates every bound whose preconditions hold; failures are recorded
/// in `notes` instead of thrown.
BoundReport compute_bounds(const VectorSet& x, const WeightVector& c);

}  // namespace radiso
