#include "radiso/potential.hpp"

#include <cmath>

#include "radiso/combinatorics.hpp"
#include "radiso/error.hpp"

namespace radiso {

namespace {

constexpr double kBasisDetTol = 1e-10;
constexpr std::uint64_t kBasisBlock = 4096;

void require_matching(const VectorSet& x, const Vector& t) {
  if (t.size() != x.count()) {
    throw Error(ErrorKind::dimension, "scaling vector length does not match the vector count");
  }
  if (!t.allFinite()) throw Error(ErrorKind::range, "scaling vector has non-finite entries");
}

}  // namespace

Matrix WeightedGram::q() const { return std::exp(log_scale) * q_scaled; }

Vector WeightedGram::singular_values() const { return std::exp(0.5 * log_scale) * sigma_scaled; }

WeightedGram assemble(const VectorSet& x, const ScalingVector& t, double svd_tol) {
  require_matching(x, t.entries);
  const double t_max = t.entries.maxCoeff();
  const double t_min = t.entries.minCoeff();
  if (t_max - t_min > kMaxLogSpread) {
    throw Error(ErrorKind::range, "max(t) - min(t) exceeds " + std::to_string(kMaxLogSpread));
  }

  const int n = x.count();
  Matrix a(n, x.dim());
  for (int i = 0; i < n; ++i) {
    a.row(i) = std::exp(0.5 * (t.entries[i] - t_max)) * x.column(i).transpose();
  }

  // Jacobi SVD is accurate to a few ulps relative to ||A||, far below any
  // svd_tol a caller can request; the tolerance is recorded, not consumed.
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  WeightedGram g;
  g.t = t;
  g.log_scale = t_max;
  g.u = svd.matrixU();
  g.sigma_scaled = svd.singularValues();
  g.v = svd.matrixV();
  g.q_scaled = g.v * g.sigma_scaled.array().square().matrix().asDiagonal() * g.v.transpose();
  g.svd_tol = svd_tol;
  return g;
}

double phi(const WeightedGram& g) {
  const Vector& s = g.sigma_scaled;
  if (!(s[0] > 0.0) || s[s.size() - 1] <= kRankTol * s[0]) {
    throw Error(ErrorKind::singular, "Q(t) is numerically singular");
  }
  return 2.0 * s.array().log().sum() + static_cast<double>(s.size()) * g.log_scale;
}

double f_value(const WeightedGram& g, const WeightVector& c) { return phi(g) - c.values().dot(g.t.entries); }

Vector grad_phi(const WeightedGram& g) { return g.u.rowwise().squaredNorm(); }

Vector grad_f(const WeightedGram& g, const WeightVector& c) { return grad_phi(g) - c.values(); }

HessianMatrix hessian(const WeightedGram& g) {
  const Matrix gram = g.u * g.u.transpose();
  HessianMatrix h = -gram.array().square().matrix();
  const Vector norms = g.u.rowwise().squaredNorm();
  h.diagonal() = norms.array() - norms.array().square();
  return h;
}

double spectral_bound_check(const HessianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

double min_eigenvalue_on_e0(const HessianMatrix& h) {
  const auto n = h.rows();
  if (n < 2) return 0.0;
  // Orthonormal basis of the complement of 1: the trailing n-1 columns of
  // the Householder QR of the all-ones vector.
  const Matrix q = Eigen::HouseholderQR<Matrix>(Matrix::Ones(n, 1)).householderQ();
  const Matrix basis = q.rightCols(n - 1);
  const Matrix restricted = basis.transpose() * h * basis;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(restricted, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[0];
}

Matrix q_inv_sqrt_symmetric(const WeightedGram& g) {
  const double scale = std::exp(-0.5 * g.log_scale);
  return scale * (g.v * g.sigma_scaled.cwiseInverse().asDiagonal() * g.v.transpose());
}

Matrix q_inv_sqrt_svd(const WeightedGram& g) {
  const double scale = std::exp(-0.5 * g.log_scale);
  return scale * (g.sigma_scaled.cwiseInverse().asDiagonal() * g.v.transpose());
}

std::vector<Basis> subset_determinants(const VectorSet& x) {
  const int n = x.count();
  const int d = x.dim();
  const std::uint64_t total = binomial(n, d);
  if (total > kEnumerationCap) {
    throw Error(ErrorKind::cap, "C(" + std::to_string(n) + ", " + std::to_string(d) + ") = " +
                                    std::to_string(total) + " exceeds the enumeration cap");
  }

  std::vector<double> dets(total, 0.0);
  parallel_blocks(total, kBasisBlock, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<int> idx = unrank_combination(n, d, begin);
    Matrix sub(d, d);
    for (std::uint64_t r = begin; r < end; ++r) {
      double norm_product = 1.0;
      for (int k = 0; k < d; ++k) {
        sub.col(k) = x.column(idx[static_cast<std::size_t>(k)]);
        norm_product *= sub.col(k).norm();
      }
      const double det = Eigen::PartialPivLU<Matrix>(sub).determinant();
      dets[r] = std::abs(det) >= kBasisDetTol * norm_product ? det : 0.0;
      next_combination(idx, n);
    }
  });

  std::vector<Basis> bases;
  std::vector<int> idx(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) idx[static_cast<std::size_t>(k)] = k;
  for (std::uint64_t r = 0; r < total; ++r) {
    if (dets[r] != 0.0) {
      bases.push_back(Basis{idx, dets[r] * dets[r], 2.0 * std::log(std::abs(dets[r]))});
    }
    next_combination(idx, n);
  }
  return bases;
}

SubsetExpansion::SubsetExpansion(const VectorSet& x)
    : n_(x.count()), d_(x.dim()), bases_(subset_determinants(x)) {
  if (bases_.empty()) throw Error(ErrorKind::rank, "no d-subset of the vectors is a basis");
}

SubsetExpansion::SubsetExpansion(int n, int d, std::vector<Basis> bases)
    : n_(n), d_(d), bases_(std::move(bases)) {
  if (bases_.empty()) throw Error(ErrorKind::rank, "no d-subset of the vectors is a basis");
}

Vector SubsetExpansion::log_terms(const Vector& t) const {
  if (t.size() != n_) throw Error(ErrorKind::dimension, "scaling vector length does not match");
  Vector w(static_cast<Eigen::Index>(bases_.size()));
  for (std::size_t s = 0; s < bases_.size(); ++s) {
    double ts = 0.0;
    for (int i : bases_[s].indices) ts += t[i];
    w[static_cast<Eigen::Index>(s)] = ts + bases_[s].log_delta;
  }
  return w;
}

double SubsetExpansion::phi(const Vector& t) const {
  const Vector w = log_terms(t);
  const double m = w.maxCoeff();
  double sum = 0.0;
  for (Eigen::Index s = 0; s < w.size(); ++s) sum += std::exp(w[s] - m);
  return m + std::log(sum);
}

Vector SubsetExpansion::lambda(const Vector& t) const {
  const Vector w = log_terms(t);
  const double m = w.maxCoeff();
  Vector lam = (w.array() - m).exp();
  double sum = 0.0;
  for (Eigen::Index s = 0; s < lam.size(); ++s) sum += lam[s];
  return lam / sum;
}

Vector SubsetExpansion::grad(const Vector& t) const {
  const Vector lam = lambda(t);
  Vector p = Vector::Zero(n_);
  for (std::size_t s = 0; s < bases_.size(); ++s) {
    for (int i : bases_[s].indices) p[i] += lam[static_cast<Eigen::Index>(s)];
  }
  return p;
}

Matrix SubsetExpansion::hessian(const Vector& t) const {
  const Vector lam = lambda(t);
  Vector p = Vector::Zero(n_);
  Matrix h = Matrix::Zero(n_, n_);
  for (std::size_t s = 0; s < bases_.size(); ++s) {
    const double l = lam[static_cast<Eigen::Index>(s)];
    const auto& idx = bases_[s].indices;
    for (int i : idx) {
      p[i] += l;
      for (int j : idx) h(i, j) += l;
    }
  }
  h.noalias() -= p * p.transpose();
  return h;
}

double phi_cauchy_binet(const VectorSet& x, const ScalingVector& t) {
  require_matching(x, t.entries);
  return SubsetExpansion(x).phi(t.entries);
}

Vector grad_phi_subsets(const VectorSet& x, const ScalingVector& t) {
  require_matching(x, t.entries);
  return SubsetExpansion(x).grad(t.entries);
}

}  // namespace radiso
