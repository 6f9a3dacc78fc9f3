#include "radiso/polytope.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "radiso/combinatorics.hpp"
#include "radiso/error.hpp"
#include "radiso/lp.hpp"

namespace radiso {

namespace {

int span_rank(const Matrix& cols) {
  if (cols.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(cols);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s[0] <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) r += s[k] > kRankTol * s[0] ? 1 : 0;
  return r;
}

Matrix gather(const Matrix& x, std::span<const int> idx) {
  Matrix out(x.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = x.col(idx[k]);
  return out;
}

std::vector<int> mask_members(std::uint32_t mask) {
  std::vector<int> out;
  while (mask != 0) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

std::string format_indices(std::span<const int> idx) {
  std::ostringstream out;
  out << '{';
  for (std::size_t k = 0; k < idx.size(); ++k) out << (k ? "," : "") << idx[k] + 1;
  out << '}';
  return out.str();
}

// rank[J] and sum_{i in J} c_i for every subset J, filled by a depth-first
// walk that extends an orthonormal frame one vector at a time.
struct SubsetScan {
  const Matrix& x;
  const Vector& c;
  int n;
  int d;
  std::vector<std::uint8_t> rank;
  std::vector<double> csum;
  std::vector<Matrix> frames;

  SubsetScan(const Matrix& xs, const Vector& cs)
      : x(xs), c(cs), n(static_cast<int>(xs.cols())), d(static_cast<int>(xs.rows())) {
    const std::size_t total = std::size_t{1} << n;
    rank.assign(total, 0);
    csum.assign(total, 0.0);
    frames.assign(static_cast<std::size_t>(n + 1), Matrix::Zero(d, d));
    visit(0, 0, 0, 0, 0.0);
  }

  void visit(int next, std::uint32_t mask, int depth, int r, double s) {
    const Matrix& parent = frames[static_cast<std::size_t>(depth)];
    Matrix& q = frames[static_cast<std::size_t>(depth + 1)];
    for (int j = next; j < n; ++j) {
      const std::uint32_t m = mask | (std::uint32_t{1} << j);
      int r2 = r;
      if (r < d) {
        q.leftCols(r) = parent.leftCols(r);
        Vector v = x.col(j);
        for (int pass = 0; pass < 2; ++pass) v -= q.leftCols(r) * (q.leftCols(r).transpose() * v);
        const double nv = v.norm();
        if (nv > kSpanTol) {
          q.col(r) = v / nv;
          r2 = r + 1;
        }
      } else {
        q = parent;
      }
      rank[m] = static_cast<std::uint8_t>(r2);
      csum[m] = s + c[j];
      if (j + 1 < n) visit(j + 1, m, depth + 1, r2, s + c[j]);
    }
  }
};

void check_sizes(const VectorSet& x, const WeightVector& c) {
  if (c.size() != x.count()) {
    throw Error(ErrorKind::dimension, "weights have " + std::to_string(c.size()) + " entries for " +
                                          std::to_string(x.count()) + " vectors");
  }
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double log_sum_exp(std::span<const double> v) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double a : v) hi = std::max(hi, a);
  double s = 0.0;
  for (double a : v) s += std::exp(a - hi);
  return hi + std::log(s);
}

struct Candidate {
  std::vector<int> indices;
  Matrix frame;  // d x k orthonormal
};

std::vector<Candidate> deepness_candidates(const VectorSet& x) {
  const int n = x.count();
  const int d = x.dim();
  std::uint64_t total = 0;
  for (int k = 1; k < d; ++k) {
    const std::uint64_t add = binomial(n, k) + binomial(n, k + 1);
    total = add > std::numeric_limits<std::uint64_t>::max() - total ? std::numeric_limits<std::uint64_t>::max()
                                                                    : total + add;
  }
  if (total > kEnumerationCap) {
    throw Error(ErrorKind::cap, std::to_string(total) + " candidate subspaces exceed the enumeration cap");
  }
  std::vector<Candidate> out;
  for (int k = 1; k < d; ++k) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    do {
      const Matrix cols = gather(x.columns(), idx);
      Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU);
      if (svd.singularValues()[k - 1] > kSpanTol) out.push_back({idx, svd.matrixU().leftCols(k)});
    } while (next_combination(idx, n));

    if (k + 1 > n) continue;
    idx.assign(static_cast<std::size_t>(k + 1), 0);
    std::iota(idx.begin(), idx.end(), 0);
    do {
      const Matrix cols = gather(x.columns(), idx);
      Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU);
      if (svd.singularValues()[k - 1] > kSpanTol) out.push_back({idx, svd.matrixU().leftCols(k)});
    } while (next_combination(idx, n));
  }
  return out;
}

std::vector<DeepnessProbe> probe_grid(const VectorSet& x, const WeightVector& c, std::span<const double> grid) {
  check_sizes(x, c);
  const int n = x.count();
  std::vector<DeepnessProbe> probes(grid.size());
  const auto candidates = deepness_candidates(x);
  for (auto& p : probes) p.checked_subspaces = candidates.size();
  Vector dist(n);
  for (const auto& cand : candidates) {
    const Matrix resid = x.columns() - cand.frame * (cand.frame.transpose() * x.columns());
    dist = resid.colwise().norm().transpose();
    const double k = static_cast<double>(cand.frame.cols());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) {
        if (dist[j] <= grid[g] + 1e-12) s += c[j];
      }
      const double eta = 1.0 - s / k;
      if (eta < probes[g].eta) {
        probes[g].eta = eta;
        probes[g].worst_case = cand.indices;
      }
    }
  }
  return probes;
}

}  // namespace

std::vector<Basis> enumerate_bases(const VectorSet& x) {
  auto bases = subset_determinants(x);
  if (bases.empty()) throw Error(ErrorKind::rank, "no d-subset of the input is a basis");
  return bases;
}

PolytopeReport membership(const VectorSet& x, const WeightVector& c) {
  check_sizes(x, c);
  const int n = x.count();
  const int d = x.dim();
  if (n > kMembershipMaxCount) {
    throw Error(ErrorKind::cap, "exhaustive membership needs n <= " + std::to_string(kMembershipMaxCount) +
                                    "; use the LP membership test instead");
  }
  const SubsetScan scan(x.columns(), c.values());
  const std::uint32_t full = static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1);
  const double tol = kBoundaryTol * d;

  PolytopeReport report;
  double worst = tol;
  std::uint32_t worst_mask = 0;
  for (std::uint32_t m = 1; m <= full; ++m) {
    const double viol = scan.csum[m] - scan.rank[m];
    if (viol > worst) {
      worst = viol;
      worst_mask = m;
    }
  }

  auto separates = [&](std::uint32_t m) { return scan.rank[m] + scan.rank[full ^ m] == d; };

  std::uint32_t tight_mask = 0;
  if (worst_mask != 0) {
    report.member = Membership::outside;
    tight_mask = worst_mask;
  } else {
    for (std::uint32_t m = 1; m < full; ++m) {
      if (scan.csum[m] - scan.rank[m] >= -tol && !separates(m)) {
        tight_mask = m;
        report.member = Membership::boundary;
        break;
      }
    }
  }
  if (tight_mask != 0) {
    report.witness = Witness{mask_members(tight_mask), scan.csum[tight_mask], scan.rank[tight_mask]};
  }

  // Classes are the atoms of the Boolean algebra generated by separators.
  std::vector<std::uint32_t> atom(static_cast<std::size_t>(n), full);
  for (std::uint32_t m = 1; m < full; ++m) {
    if (!separates(m)) continue;
    for (int i = 0; i < n; ++i) atom[static_cast<std::size_t>(i)] &= (m >> i & 1u) ? m : (full ^ m);
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    const std::uint32_t a = atom[static_cast<std::size_t>(i)];
    auto members = mask_members(a);
    for (int j : members) seen[static_cast<std::size_t>(j)] = true;
    report.classes.push_back(std::move(members));
    report.class_dims.push_back(scan.rank[a]);
  }
  return report;
}

namespace {

// Restricted master problems over a growing subset of the basis columns.
// Pricing scans every enumerated basis; a column enters when its reduced
// cost exceeds kPriceTol. Columns are never removed, so the loop ends.
constexpr double kPriceTol = 1e-10;
constexpr std::size_t kColumnsPerRound = 25;

class ColumnGeneration {
 public:
  ColumnGeneration(const std::vector<Basis>& bases, int n) : bases_(bases), n_(n) {}

  // Columns (by basis index) with reduced cost -(sum_{i in S} y_i + y_n)
  // above the tolerance, most attractive first.
  std::vector<int> price(const Vector& y, const std::vector<char>& in_master) const {
    std::vector<std::pair<double, int>> cand;
    for (std::size_t s = 0; s < bases_.size(); ++s) {
      if (in_master[s]) continue;
      double v = y[n_];
      for (int i : bases_[s].indices) v += y[i];
      if (-v > kPriceTol) cand.emplace_back(v, static_cast<int>(s));
    }
    const std::size_t take = std::min(cand.size(), kColumnsPerRound);
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end());
    std::vector<int> out;
    for (std::size_t k = 0; k < take; ++k) out.push_back(cand[k].second);
    return out;
  }

  void fill_column(Matrix& a, int col, int basis) const {
    a.col(col).setZero();
    for (int i : bases_[static_cast<std::size_t>(basis)].indices) a(i, col) = 1.0;
    a(n_, col) = 1.0;
  }

 private:
  const std::vector<Basis>& bases_;
  int n_;
};

// A basis of maximal c-weight; a good first column.
int greedy_basis(const std::vector<Basis>& bases, const WeightVector& c) {
  int best = 0;
  double best_w = -1.0;
  for (std::size_t s = 0; s < bases.size(); ++s) {
    double w = 0.0;
    for (int i : bases[s].indices) w += c[i];
    if (w > best_w) {
      best_w = w;
      best = static_cast<int>(s);
    }
  }
  return best;
}

}  // namespace

PolytopeReport membership_lp(const VectorSet& x, const WeightVector& c) {
  check_sizes(x, c);
  const int n = x.count();
  const auto bases = enumerate_bases(x);
  const int m = static_cast<int>(bases.size());
  const ColumnGeneration cg(bases, n);
  Vector b(n + 1);
  b.head(n) = c.values();
  b[n] = 1.0;

  std::vector<char> in_master(static_cast<std::size_t>(m), 0);
  std::vector<int> master = {greedy_basis(bases, c)};
  in_master[static_cast<std::size_t>(master[0])] = 1;

  // Phase one: minimize the slack needed in sum_S lambda_S (1_S, 1) = b.
  bool feasible = false;
  for (;;) {
    const int k = static_cast<int>(master.size());
    Matrix a = Matrix::Zero(n + 1, k + n + 1);
    for (int j = 0; j < k; ++j) cg.fill_column(a, j, master[static_cast<std::size_t>(j)]);
    a.rightCols(n + 1) = Matrix::Identity(n + 1, n + 1);
    Vector cost = Vector::Zero(k + n + 1);
    cost.tail(n + 1).setConstant(-1.0);
    const LpResult lp = solve_lp(a, b, cost);
    if (lp.status != LpResult::Status::optimal) throw Error(ErrorKind::non_convergence, "membership LP failed");
    if (-lp.objective <= kBoundaryTol) {
      feasible = true;
      break;
    }
    const auto add = cg.price(lp.duals, in_master);
    if (add.empty()) break;
    for (int s : add) {
      in_master[static_cast<std::size_t>(s)] = 1;
      master.push_back(s);
    }
  }

  PolytopeReport report;
  if (!feasible) {
    report.member = Membership::outside;
  } else {
    // Phase two: lambda_S = s_S + mu for every enumerated S; maximize mu.
    // The mu column aggregates all m bases.
    Vector mu_col = Vector::Zero(n + 1);
    for (const auto& bs : bases)
      for (int i : bs.indices) mu_col[i] += 1.0;
    mu_col[n] = m;
    double mu = 0.0;
    for (;;) {
      const int k = static_cast<int>(master.size());
      Matrix a(n + 1, k + 1);
      for (int j = 0; j < k; ++j) cg.fill_column(a, j, master[static_cast<std::size_t>(j)]);
      a.col(k) = mu_col;
      Vector cost = Vector::Zero(k + 1);
      cost[k] = 1.0;
      const LpResult lp = solve_lp(a, b, cost);
      if (lp.status != LpResult::Status::optimal) throw Error(ErrorKind::non_convergence, "membership LP failed");
      mu = lp.x[k];
      const auto add = cg.price(lp.duals, in_master);
      if (add.empty()) break;
      for (int s : add) {
        in_master[static_cast<std::size_t>(s)] = 1;
        master.push_back(s);
      }
    }
    report.member = mu > kBoundaryTol / m ? Membership::interior : Membership::boundary;
  }
  const auto classes = equivalence_classes(x);
  report.classes = classes.members;
  report.class_dims = classes.dims;
  return report;
}

EquivalenceClasses circuit_classes(const VectorSet& x) {
  const int n = x.count();
  const int d = x.dim();
  const Matrix& cols = x.columns();

  std::vector<int> basis;
  for (int i = 0; i < n && static_cast<int>(basis.size()) < d; ++i) {
    basis.push_back(i);
    if (span_rank(gather(cols, basis)) < static_cast<int>(basis.size())) basis.pop_back();
  }
  if (static_cast<int>(basis.size()) < d) throw Error(ErrorKind::rank, "the vectors do not span R^d");

  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
    return i;
  };
  auto unite = [&](int i, int j) {
    i = find(i);
    j = find(j);
    if (i != j) parent[static_cast<std::size_t>(std::max(i, j))] = std::min(i, j);
  };

  // e lies on a common circuit with b iff swapping b for e keeps a basis.
  std::vector<char> in_basis(static_cast<std::size_t>(n), 0);
  for (int b : basis) in_basis[static_cast<std::size_t>(b)] = 1;
  for (int e = 0; e < n; ++e) {
    if (in_basis[static_cast<std::size_t>(e)]) continue;
    for (std::size_t k = 0; k < basis.size(); ++k) {
      std::vector<int> swapped = basis;
      swapped[k] = e;
      if (span_rank(gather(cols, swapped)) == d) unite(e, basis[k]);
    }
  }

  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  EquivalenceClasses out;
  for (auto& [root, members] : groups) {
    out.dims.push_back(span_rank(gather(cols, members)));
    out.members.push_back(std::move(members));
  }
  return out;
}

EquivalenceClasses equivalence_classes(const VectorSet& x) {
  const int n = x.count();
  const int d = x.dim();
  const auto bases = enumerate_bases(x);

  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
      i = parent[static_cast<std::size_t>(i)];
    }
    return i;
  };
  auto unite = [&](int i, int j) {
    i = find(i);
    j = find(j);
    if (i != j) parent[static_cast<std::size_t>(std::max(i, j))] = std::min(i, j);
  };

  // Elements completing the same (d-1)-set to a basis are related.
  std::map<std::vector<int>, int> completion;
  std::vector<int> key(static_cast<std::size_t>(d - 1));
  for (const auto& b : bases) {
    for (int p = 0; p < d; ++p) {
      int w = 0;
      for (int q = 0; q < d; ++q) {
        if (q != p) key[static_cast<std::size_t>(w++)] = b.indices[static_cast<std::size_t>(q)];
      }
      const int elem = b.indices[static_cast<std::size_t>(p)];
      auto [it, inserted] = completion.emplace(key, elem);
      if (!inserted) unite(it->second, elem);
    }
  }

  EquivalenceClasses out;
  std::map<int, std::size_t> slot;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    auto [it, inserted] = slot.emplace(root, out.members.size());
    if (inserted) out.members.emplace_back();
    out.members[it->second].push_back(i);
  }
  int total = 0;
  for (const auto& cls : out.members) {
    out.dims.push_back(span_rank(gather(x.columns(), cls)));
    total += out.dims.back();
  }
  if (total != d) {
    throw Error(ErrorKind::rank, "class dimensions add up to " + std::to_string(total) + ", expected " +
                                     std::to_string(d));
  }
  return out;
}

Decomposition decompose(const VectorSet& x, const WeightVector& c) {
  return decompose(x, c, equivalence_classes(x));
}

Decomposition decompose(const VectorSet& x, const WeightVector& c, const EquivalenceClasses& classes) {
  check_sizes(x, c);
  const int d = x.dim();
  Decomposition out;
  if (classes.members.size() == 1) {
    out.pre_map = Matrix::Identity(d, d);
    std::vector<int> all(static_cast<std::size_t>(x.count()));
    std::iota(all.begin(), all.end(), 0);
    out.parts.push_back({std::move(all), Matrix::Identity(d, d), x, c});
    return out;
  }

  double worst_defect = 0.0;
  for (std::size_t j = 0; j < classes.members.size(); ++j) {
    double s = 0.0;
    for (int i : classes.members[j]) s += c[i];
    const double defect = std::abs(s - classes.dims[j]);
    if (defect > kSumTol) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "class " << format_indices(classes.members[j]) << " has weight sum " << s << " but spans dimension "
          << classes.dims[j];
      throw Error(ErrorKind::infeasible, msg.str());
    }
    worst_defect = std::max(worst_defect, defect);
  }

  const Matrix m = x.columns() * c.values().asDiagonal() * x.columns().transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const Vector& ev = eig.eigenvalues();
  if (ev[0] <= kRankTol * ev[d - 1]) throw Error(ErrorKind::singular, "weighted frame operator is singular");
  out.pre_map = eig.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  const Matrix y = out.pre_map * x.columns();

  for (std::size_t j = 0; j < classes.members.size(); ++j) {
    const auto& idx = classes.members[j];
    Eigen::JacobiSVD<Matrix> svd(gather(y, idx), Eigen::ComputeThinU);
    const Matrix frame = svd.matrixU().leftCols(classes.dims[j]);
    const Matrix local = frame.transpose() * gather(y, idx);
    out.parts.push_back({idx, frame, VectorSet::from_columns(local), c.subset(idx, classes.dims[j])});
  }

  const double tol = kFroTol * d + 10.0 * worst_defect;
  for (std::size_t j = 0; j < out.parts.size(); ++j) {
    for (std::size_t k = j + 1; k < out.parts.size(); ++k) {
      const double overlap = (out.parts[j].frame.transpose() * out.parts[k].frame).norm();
      if (overlap > tol) {
        std::ostringstream msg;
        msg << "class spans " << format_indices(out.parts[j].indices) << " and "
            << format_indices(out.parts[k].indices) << " are not orthogonal after the pre-map (overlap " << overlap
            << ")";
        throw Error(ErrorKind::infeasible, msg.str());
      }
    }
  }
  return out;
}

std::vector<double> default_delta_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(std::ldexp(1.0, -k));
  return grid;
}

DeepnessProbe deepness_eta(const VectorSet& x, const WeightVector& c, double delta) {
  const double grid[] = {delta};
  return probe_grid(x, c, grid).front();
}

DeepnessCertificate deepness_estimate(const VectorSet& x, const WeightVector& c) {
  const auto grid = default_delta_grid();
  return deepness_estimate(x, c, grid);
}

DeepnessCertificate deepness_estimate(const VectorSet& x, const WeightVector& c, std::span<const double> delta_grid) {
  if (!(c.min() > 0.0)) throw Error(ErrorKind::degenerate, "a zero weight is never deep inside the polytope");
  const auto probes = probe_grid(x, c, delta_grid);
  std::optional<DeepnessCertificate> best;
  for (std::size_t g = 0; g < probes.size(); ++g) {
    const double delta = delta_grid[g];
    if (!(delta > 0.0 && delta <= 1.0) || !(probes[g].eta > 0.0)) continue;
    const double eta = std::min(probes[g].eta, 1.0);
    const double bound = t_inf_bound(c, eta, delta, x.dim());
    if (!best || bound < best->t_inf) {
      best = DeepnessCertificate{eta, delta, probes[g].checked_subspaces, probes[g].worst_case, true, bound};
    }
  }
  if (!best) throw Error(ErrorKind::degenerate, "c is not certified deep for any delta in the grid");
  return *best;
}

double t_inf_bound(double c_min, double eta, double delta, int d) {
  return std::log(1.0 / c_min) + (d - 1) * std::log(8.0 / (eta * delta * delta));
}

double t_inf_bound(const WeightVector& c, double eta, double delta, int d) {
  return t_inf_bound(c.min(), eta, delta, d);
}

double hm_bound(const VectorSet& x, double gamma) {
  const auto bases = enumerate_bases(x);
  return hm_bound(bases, gamma);
}

double hm_bound(std::span<const Basis> bases, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::precondition, "gamma must be positive");
  if (bases.empty()) throw Error(ErrorKind::rank, "no bases");
  std::vector<double> logs;
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& b : bases) {
    logs.push_back(b.log_delta);
    lo = std::min(lo, b.log_delta);
  }
  return std::max(0.0, log_sum_exp(logs) - lo) / gamma;
}

double gamma_general_position(const WeightVector& c, const VectorSet& x) {
  const auto bases = enumerate_bases(x);
  return gamma_general_position(c, x.dim(), bases, x.count());
}

double gamma_general_position(const WeightVector& c, int d, std::span<const Basis> bases, int n) {
  if (n <= d || bases.size() != binomial(n, d)) {
    throw Error(ErrorKind::precondition, "the input is not in general position");
  }
  const double gamma = c.min() / d;
  if (c.max() > 1.0 - gamma + 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "max c = " << c.max() << " exceeds 1 - c_min/d = " << 1.0 - gamma;
    throw Error(ErrorKind::precondition, msg.str());
  }
  return gamma;
}

HmDeepness hm_to_deepness(double gamma, double delta_s_min, int d) {
  HmDeepness out;
  out.eta = gamma;
  out.delta = std::sqrt(delta_s_min) / (2.0 * d);
  out.t_inf = std::log(1.0 / (gamma * d)) + (d - 1) * std::log(32.0 * d * d / (gamma * delta_s_min));
  return out;
}

AlphaBounds alpha_bounds(const VectorSet& x, double eta, double delta, double t_inf,
                         std::optional<double> delta_s_min) {
  return alpha_bounds(x.count(), x.dim(), eta, delta, t_inf, delta_s_min);
}

AlphaBounds alpha_bounds(int n, int d, double /*eta*/, double delta, double t_inf,
                         std::optional<double> delta_s_min) {
  const double beta = 0.5;
  AlphaBounds out;
  const double ln = std::log(static_cast<double>(n));
  out.log_alpha_general = 2.0 * std::log(delta) - std::log(static_cast<double>(d)) - 4.0 * ln - 2.0 * t_inf -
                          2.0 * d * softplus(0.5 * ln + t_inf - std::log(delta));
  out.alpha_general = std::exp(out.log_alpha_general);
  out.kappa_general = std::exp(std::log(beta) - out.log_alpha_general);
  if (delta_s_min && n > d) {
    const double log_gp = 2.0 * std::log(*delta_s_min) + std::log(static_cast<double>(d) * (n - d)) -
                          4.0 * d * t_inf - std::log(static_cast<double>(n) * (n - 1));
    out.alpha_gp = std::exp(log_gp);
    out.kappa_gp = std::exp(std::log(beta) - log_gp);
  }
  return out;
}

XiEstimate xi_estimate(const WeightedGram& g, std::uint64_t samples, std::uint64_t seed) {
  const int n = static_cast<int>(g.u.rows());
  XiEstimate out;
  if (n < 2) {
    out.exact = true;
    return out;
  }
  const Matrix w = (g.u * g.u.transpose()).array().square().matrix();
  auto evaluate = [&](const std::vector<bool>& plus) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      if (plus[static_cast<std::size_t>(i)]) continue;
      for (int j = 0; j < n; ++j) {
        if (plus[static_cast<std::size_t>(j)]) s += w(i, j);
      }
    }
    return s;
  };

  std::vector<bool> best_plus;
  double best = std::numeric_limits<double>::infinity();
  if (n - 1 <= kMembershipMaxCount) {
    // Gray-code walk over sigma+ within the first n-1 elements; the last
    // element always stays in sigma-.
    out.exact = true;
    std::vector<bool> plus(static_cast<std::size_t>(n), false);
    double cur = 0.0;
    const std::uint64_t total = std::uint64_t{1} << (n - 1);
    for (std::uint64_t step = 1; step < total; ++step) {
      const int k = std::countr_zero(step);
      double in_plus = 0.0, in_minus = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        (plus[static_cast<std::size_t>(j)] ? in_plus : in_minus) += w(k, j);
      }
      if (plus[static_cast<std::size_t>(k)]) {
        cur += in_plus - in_minus;
      } else {
        cur += in_minus - in_plus;
      }
      plus[static_cast<std::size_t>(k)] = !plus[static_cast<std::size_t>(k)];
      ++out.partitions;
      if (cur < best) {
        best = cur;
        best_plus = plus;
      }
    }
  } else {
    for (int j = 0; j < n; ++j) {
      std::vector<bool> plus(static_cast<std::size_t>(n), false);
      plus[static_cast<std::size_t>(j)] = true;
      const double v = evaluate(plus);
      ++out.partitions;
      if (v < best) {
        best = v;
        best_plus = plus;
      }
    }
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    for (std::uint64_t s = 0; s < samples; ++s) {
      std::vector<bool> plus(static_cast<std::size_t>(n));
      int count = 0;
      for (int j = 0; j < n; ++j) {
        plus[static_cast<std::size_t>(j)] = coin(rng);
        count += plus[static_cast<std::size_t>(j)] ? 1 : 0;
      }
      if (count == 0 || count == n) continue;
      const double v = evaluate(plus);
      ++out.partitions;
      if (v < best) {
        best = v;
        best_plus = plus;
      }
    }
  }
  // Recompute the winner directly so incremental drift never leaks out.
  out.value = evaluate(best_plus);
  for (int j = 0; j < n; ++j) {
    if (best_plus[static_cast<std::size_t>(j)]) out.minimizer.push_back(j);
  }
  return out;
}

BoundReport compute_bounds(const VectorSet& x, const WeightVector& c) {
  check_sizes(x, c);
  const int n = x.count();
  const int d = x.dim();
  BoundReport out;
  out.c_min = c.min();

  try {
    out.deepness = deepness_estimate(x, c);
    out.t_inf_new = out.deepness->t_inf;
  } catch (const Error& e) {
    out.notes.push_back(std::string("deepness: ") + e.what());
  }

  bool general_position = false;
  try {
    const auto bases = enumerate_bases(x);
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& b : bases) lo = std::min(lo, b.delta);
    out.delta_s_min = lo;
    general_position = n > d && bases.size() == binomial(n, d);
    try {
      out.gamma = gamma_general_position(c, d, bases, n);
      out.t_inf_hm = hm_bound(bases, *out.gamma);
      out.hm_deepness = hm_to_deepness(*out.gamma, lo, d);
    } catch (const Error& e) {
      out.notes.push_back(std::string("gamma: ") + e.what());
    }
  } catch (const Error& e) {
    out.notes.push_back(std::string("bases: ") + e.what());
  }

  std::optional<double> delta;
  if (out.deepness) {
    out.t_inf_used = out.deepness->t_inf;
    delta = out.deepness->delta;
  } else if (out.hm_deepness) {
    out.t_inf_used = out.hm_deepness->t_inf;
    delta = out.hm_deepness->delta;
  }
  if (out.t_inf_used) {
    const double eta = out.deepness ? out.deepness->eta : out.hm_deepness->eta;
    out.alpha = alpha_bounds(n, d, eta, *delta, *out.t_inf_used,
                             general_position ? out.delta_s_min : std::nullopt);
  } else {
    out.notes.push_back("alpha: no |t*| bound available");
  }
  return out;
}

}  // namespace radiso
