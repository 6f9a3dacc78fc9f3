#pragma once

// Domain types shared by every module: the input configuration, target
// weights, log-scaling vectors and the transformation/result records.

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace radiso {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Columns whose norm differs from one by more than this are reported as
/// renormalized.
inline constexpr double kUnitTol = 1e-8;
/// Columns shorter than this are rejected outright.
inline constexpr double kZeroNormTol = 1e-12;
/// Relative singular-value threshold used for every rank decision.
inline constexpr double kRankTol = 1e-10;
/// Largest tolerated |sum(c) - d| before the weights are refused.
inline constexpr double kSumTol = 1e-8;

/// A finite set of n unit vectors in R^d, stored as the columns of a d x n
/// matrix. The columns are guaranteed to span R^d.
class VectorSet {
 public:
  /// Validates and renormalizes raw columns. Throws Error with kind
  /// dimension (n < d), zero_vector, or rank (columns do not span R^d).
  static VectorSet from_columns(Matrix raw);

  int dim() const { return static_cast<int>(columns_.rows()); }
  int count() const { return static_cast<int>(columns_.cols()); }

  const Matrix& columns() const { return columns_; }
  auto column(int i) const { return columns_.col(i); }

  /// Original Euclidean norm of every input column.
  const Vector& scale_factors() const { return scale_factors_; }
  /// True when at least one column was off the unit sphere by more than
  /// kUnitTol.
  bool renormalized() const { return renormalized_; }

  /// Columns at the given indices. The result must still span R^d.
  VectorSet subset(std::span<const int> indices) const;

 private:
  VectorSet() = default;

  Matrix columns_;
  Vector scale_factors_;
  bool renormalized_ = false;
};

/// Which entries a weight vector may hold. Zero entries describe faces of
/// the basis polytope; the solver refuses them through the membership check.
enum class WeightDomain { positive, nonnegative };

/// Target marginals c with entries summing to d.
class WeightVector {
 public:
  /// Throws Error with kind sign (an entry outside the domain) or
  /// weight_sum.
  static WeightVector from_values(Vector raw, int dim, WeightDomain domain = WeightDomain::positive);
  static WeightVector uniform(int count, int dim);

  const Vector& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }
  int size() const { return static_cast<int>(values_.size()); }
  int dim() const { return dim_; }
  double min() const { return values_.minCoeff(); }
  double max() const { return values_.maxCoeff(); }
  /// Factor applied to the raw entries to make them sum to d.
  double rescale() const { return rescale_; }

  WeightVector subset(std::span<const int> indices, int dim) const;

 private:
  WeightVector() = default;

  WeightDomain domain_ = WeightDomain::positive;
  Vector values_;
  int dim_ = 0;
  double rescale_ = 1.0;
};

enum class Normalization { raw, min_zero, mean_zero };

/// Log-weights t; vector i is scaled by exp(t_i / 2).
struct ScalingVector {
  Vector entries;
  Normalization normalization = Normalization::raw;
};

ScalingVector normalize_scaling(const ScalingVector& t, Normalization mode);

enum class TransformProvenance { q_inv_sqrt_symmetric, sigma_inv_vt };

/// A nonsingular d x d linear map.
class Transformation {
 public:
  Transformation() = default;

  /// Throws Error(singular) when |det| <= kRankTol * ||T||^d, and
  /// Error(precondition) when a symmetric provenance is claimed for a
  /// non-symmetric matrix.
  static Transformation make(Matrix map, TransformProvenance provenance);

  const Matrix& map() const { return map_; }
  TransformProvenance provenance() const { return provenance_; }

 private:
  Matrix map_;
  TransformProvenance provenance_ = TransformProvenance::q_inv_sqrt_symmetric;
};

enum class Method {
  smooth,
  smooth_nesterov,
  strongly_convex,
  strongly_convex_nesterov,
  newton_oracle,
};

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

struct TraceEntry {
  int iteration = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  Vector t;
};

struct IsotropyResult {
  ScalingVector t_apx;
  Transformation transform;
  /// grad Phi(t_apx); sums to d by construction, so it is kept as a plain
  /// vector instead of a renormalized WeightVector.
  Vector c_apx;
  double isotropy_residual = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  Method method = Method::smooth;
  std::vector<TraceEntry> trace;
  std::vector<std::string> warnings;
};

enum class Membership { interior, boundary, outside };

std::string_view to_string(Membership m);

struct Witness {
  std::vector<int> indices;
  double c_sum = 0.0;
  int span_dim = 0;
};

struct PolytopeReport {
  Membership member = Membership::interior;
  std::optional<Witness> witness;
  std::vector<std::vector<int>> classes;
  std::vector<int> class_dims;
};

struct Instance {
  VectorSet vectors;
  WeightVector weights;
};

enum class InstanceFormat { json, csv };

/// Target weights supplied out of band (CLI flag): either uniform d/n or an
/// explicit list.
struct WeightSpec {
  bool uniform = true;
  std::vector<double> values;

  static WeightSpec parse(std::string_view text);
};

/// JSON: {"d": int, "n": int, "vectors": [[d floats] x n], "c": [...] |
/// "uniform"}. CSV: one vector per row; weights come from `weights` and
/// default to uniform. When given, `weights` also overrides a JSON "c".
Instance parse_instance(std::string_view text, InstanceFormat format,
                        const std::optional<WeightSpec>& weights = {},
                        WeightDomain domain = WeightDomain::positive);

/// Inverse of parse_instance for the JSON grammar, round-trip exact.
std::string serialize_instance(const Instance& instance);

/// Frobenius norm of sum_i c_i z_i z_i^T - I for z_i = T x_i / |T x_i|.
double isotropy_residual(const VectorSet& x, const Vector& c, const Matrix& t);

}  // namespace radiso
