#include "radiso/model.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "radiso/error.hpp"

namespace radiso {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Columns (and weight sums) within a few ulps of their target are left
// untouched, which makes parsing a serialized instance bit-for-bit stable.
constexpr double kIdempotenceSlack = 8.0 * kEps;

int numeric_rank(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s[k] > kRankTol * s[0]) ++r;
  }
  return r;
}

double parse_double(std::string_view field) {
  while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) field.remove_prefix(1);
  while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) field.remove_suffix(1);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw Error(ErrorKind::parse, "invalid number '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) throw Error(ErrorKind::parse, "non-finite number '" + std::string(field) + "'");
  return value;
}

std::vector<double> split_numbers(std::string_view line) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) comma = line.size();
    out.push_back(parse_double(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

WeightVector resolve_weights(const WeightSpec& spec, int n, int d, WeightDomain domain) {
  if (spec.uniform) return WeightVector::uniform(n, d);
  if (static_cast<int>(spec.values.size()) != n) {
    throw Error(ErrorKind::dimension, "expected " + std::to_string(n) + " weights, got " +
                                          std::to_string(spec.values.size()));
  }
  return WeightVector::from_values(Eigen::Map<const Vector>(spec.values.data(), n), d, domain);
}

}  // namespace

VectorSet VectorSet::from_columns(Matrix raw) {
  const auto d = raw.rows();
  const auto n = raw.cols();
  if (d < 1) throw Error(ErrorKind::dimension, "dimension must be positive");
  if (n < d) {
    throw Error(ErrorKind::dimension,
                "need at least d vectors (n=" + std::to_string(n) + ", d=" + std::to_string(d) + ")");
  }
  if (!raw.allFinite()) throw Error(ErrorKind::parse, "non-finite vector entry");

  VectorSet out;
  out.scale_factors_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = raw.col(i).norm();
    if (norm < kZeroNormTol) {
      throw Error(ErrorKind::zero_vector, "vector " + std::to_string(i) + " has (near) zero norm");
    }
    out.scale_factors_[i] = norm;
    if (std::abs(norm - 1.0) > kUnitTol) out.renormalized_ = true;
    if (std::abs(norm - 1.0) > kIdempotenceSlack) raw.col(i) /= norm;
  }
  if (numeric_rank(raw) < d) throw Error(ErrorKind::rank, "vectors do not span R^" + std::to_string(d));
  out.columns_ = std::move(raw);
  return out;
}

VectorSet VectorSet::subset(std::span<const int> indices) const {
  Matrix cols(dim(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) cols.col(static_cast<Eigen::Index>(k)) = columns_.col(indices[k]);
  return from_columns(std::move(cols));
}

WeightVector WeightVector::from_values(Vector raw, int dim, WeightDomain domain) {
  if (dim < 1) throw Error(ErrorKind::dimension, "dimension must be positive");
  if (!raw.allFinite()) throw Error(ErrorKind::parse, "non-finite weight");
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const bool ok = domain == WeightDomain::positive ? raw[i] > 0.0 : raw[i] >= 0.0;
    if (!ok) {
      throw Error(ErrorKind::sign, "weight " + std::to_string(i) +
                                       (domain == WeightDomain::positive ? " is not positive" : " is negative"));
    }
  }
  const double sum = raw.sum();
  if (std::abs(sum - dim) > kSumTol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weights sum to " << sum << ", expected " << dim;
    throw Error(ErrorKind::weight_sum, msg.str());
  }
  WeightVector out;
  out.dim_ = dim;
  out.domain_ = domain;
  if (std::abs(sum - dim) > kIdempotenceSlack * dim) {
    out.rescale_ = dim / sum;
    raw *= out.rescale_;
  }
  out.values_ = std::move(raw);
  return out;
}

WeightVector WeightVector::uniform(int count, int dim) {
  if (count < 1 || dim < 1) throw Error(ErrorKind::dimension, "uniform weights need n, d >= 1");
  WeightVector out;
  out.dim_ = dim;
  out.values_ = Vector::Constant(count, static_cast<double>(dim) / count);
  return out;
}

WeightVector WeightVector::subset(std::span<const int> indices, int dim) const {
  Vector part(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) part[static_cast<Eigen::Index>(k)] = values_[indices[k]];
  return from_values(std::move(part), dim, domain_);
}

ScalingVector normalize_scaling(const ScalingVector& t, Normalization mode) {
  ScalingVector out{t.entries, mode};
  if (out.entries.size() == 0) return out;
  switch (mode) {
    case Normalization::min_zero:
      out.entries.array() -= out.entries.minCoeff();
      break;
    case Normalization::mean_zero:
      out.entries.array() -= out.entries.mean();
      break;
    case Normalization::raw:
      break;
  }
  return out;
}

Transformation Transformation::make(Matrix map, TransformProvenance provenance) {
  if (map.rows() != map.cols() || map.rows() == 0) {
    throw Error(ErrorKind::dimension, "transformation must be a non-empty square matrix");
  }
  if (!map.allFinite()) throw Error(ErrorKind::singular, "transformation has non-finite entries");
  // Scale-free test: the smallest singular value relative to the largest.
  Eigen::JacobiSVD<Matrix> svd(map);
  const Vector& s = svd.singularValues();
  if (!(s[0] > 0.0) || s[s.size() - 1] <= kRankTol * s[0]) {
    throw Error(ErrorKind::singular, "transformation is singular");
  }
  if (provenance == TransformProvenance::q_inv_sqrt_symmetric) {
    const double asym = (map - map.transpose()).norm();
    if (asym > 1e-9 * map.norm()) {
      throw Error(ErrorKind::precondition, "symmetric provenance claimed for a non-symmetric map");
    }
  }
  Transformation out;
  out.map_ = std::move(map);
  out.provenance_ = provenance;
  return out;
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::smooth: return "smooth";
    case Method::smooth_nesterov: return "smooth_nesterov";
    case Method::strongly_convex: return "strongly_convex";
    case Method::strongly_convex_nesterov: return "strongly_convex_nesterov";
    case Method::newton_oracle: return "newton_oracle";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::smooth, Method::smooth_nesterov, Method::strongly_convex,
                   Method::strongly_convex_nesterov, Method::newton_oracle}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::interior: return "interior";
    case Membership::boundary: return "boundary";
    case Membership::outside: return "outside";
  }
  return "unknown";
}

WeightSpec WeightSpec::parse(std::string_view text) {
  WeightSpec spec;
  if (text == "uniform") return spec;
  spec.uniform = false;
  spec.values = split_numbers(text);
  return spec;
}

Instance parse_instance(std::string_view text, InstanceFormat format,
                        const std::optional<WeightSpec>& weights, WeightDomain domain) {
  if (format == InstanceFormat::csv) {
    std::vector<std::vector<double>> rows;
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      start = end + 1;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
      if (line.front() == '#') continue;
      rows.push_back(split_numbers(line));
    }
    if (rows.empty()) throw Error(ErrorKind::parse, "CSV instance has no rows");
    const auto d = static_cast<Eigen::Index>(rows.front().size());
    Matrix cols(d, static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != d) {
        throw Error(ErrorKind::parse, "CSV row " + std::to_string(i + 1) + " has the wrong length");
      }
      for (Eigen::Index k = 0; k < d; ++k) cols(k, static_cast<Eigen::Index>(i)) = rows[i][k];
    }
    auto vectors = VectorSet::from_columns(std::move(cols));
    auto c = resolve_weights(weights.value_or(WeightSpec{}), vectors.count(), vectors.dim(), domain);
    return Instance{std::move(vectors), std::move(c)};
  }

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::parse, std::string("malformed JSON: ") + e.what());
  }
  try {
    const int d = doc.at("d").get<int>();
    const int n = doc.at("n").get<int>();
    const auto& vecs = doc.at("vectors");
    if (!vecs.is_array() || static_cast<int>(vecs.size()) != n) {
      throw Error(ErrorKind::parse, "\"vectors\" must be an array of n entries");
    }
    if (d < 1) throw Error(ErrorKind::dimension, "d must be positive");
    Matrix cols(d, n);
    for (int i = 0; i < n; ++i) {
      const auto& v = vecs[static_cast<std::size_t>(i)];
      if (!v.is_array() || static_cast<int>(v.size()) != d) {
        throw Error(ErrorKind::parse, "vector " + std::to_string(i) + " must have d entries");
      }
      for (int k = 0; k < d; ++k) cols(k, i) = v[static_cast<std::size_t>(k)].get<double>();
    }
    auto vectors = VectorSet::from_columns(std::move(cols));

    WeightSpec spec;
    if (weights) {
      spec = *weights;
    } else if (!doc.contains("c")) {
      throw Error(ErrorKind::parse, "instance has no \"c\" and no weights were supplied");
    } else if (doc["c"].is_string()) {
      if (doc["c"].get<std::string>() != "uniform") throw Error(ErrorKind::parse, "\"c\" must be \"uniform\" or an array");
    } else {
      spec.uniform = false;
      spec.values = doc["c"].get<std::vector<double>>();
    }
    auto c = resolve_weights(spec, n, d, domain);
    return Instance{std::move(vectors), std::move(c)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("invalid instance: ") + e.what());
  }
}

std::string serialize_instance(const Instance& instance) {
  const auto& x = instance.vectors;
  nlohmann::json doc;
  doc["d"] = x.dim();
  doc["n"] = x.count();
  auto vecs = nlohmann::json::array();
  for (int i = 0; i < x.count(); ++i) {
    auto v = nlohmann::json::array();
    for (int k = 0; k < x.dim(); ++k) v.push_back(x.columns()(k, i));
    vecs.push_back(std::move(v));
  }
  doc["vectors"] = std::move(vecs);
  const Vector& c = instance.weights.values();
  doc["c"] = std::vector<double>(c.data(), c.data() + c.size());
  return doc.dump(2);
}

double isotropy_residual(const VectorSet& x, const Vector& c, const Matrix& t) {
  const int d = x.dim();
  Matrix m = -Matrix::Identity(d, d);
  for (int i = 0; i < x.count(); ++i) {
    Vector z = t * x.column(i);
    z /= z.norm();
    m.noalias() += c[i] * z * z.transpose();
  }
  return m.norm();
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::rank: return "rank";
    case ErrorKind::sign: return "sign";
    case ErrorKind::weight_sum: return "weight_sum";
    case ErrorKind::zero_vector: return "zero_vector";
    case ErrorKind::range: return "range";
    case ErrorKind::singular: return "singular";
    case ErrorKind::cap: return "cap";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::reducible: return "reducible";
    case ErrorKind::missing_alpha: return "missing_alpha";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::degenerate: return "degenerate";
  }
  return "unknown";
}

}  // namespace radiso
