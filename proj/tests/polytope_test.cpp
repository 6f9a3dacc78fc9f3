#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "radiso/combinatorics.hpp"
#include "radiso/error.hpp"
#include "radiso/lp.hpp"
#include "radiso/polytope.hpp"
#include "support/instances.hpp"

using namespace radiso;
namespace rt = radiso::testing;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::parse;
}

WeightVector weights(std::initializer_list<double> v, int d) {
  Vector c(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double a : v) c[i++] = a;
  return WeightVector::from_values(c, d, WeightDomain::nonnegative);
}

// Independent brute force for the relation: i ~ j when some (d-1)-set
// completes both to a basis, closed transitively.
std::vector<std::vector<int>> brute_classes(const VectorSet& x) {
  const int n = x.count();
  const int d = x.dim();
  auto is_basis = [&](const std::vector<int>& s) {
    Matrix m(d, d);
    for (int k = 0; k < d; ++k) m.col(k) = x.column(s[static_cast<std::size_t>(k)]);
    return std::abs(m.determinant()) > 1e-9;
  };
  Matrix rel = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) rel(i, i) = 1;
  std::vector<int> s(static_cast<std::size_t>(d - 1));
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = static_cast<int>(k);
  do {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (std::find(s.begin(), s.end(), i) != s.end() || std::find(s.begin(), s.end(), j) != s.end()) continue;
        auto si = s, sj = s;
        si.push_back(i);
        sj.push_back(j);
        if (is_basis(si) && is_basis(sj)) rel(i, j) = 1;
      }
  } while (d > 1 && next_combination(s, n));
  if (d == 1) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) rel(i, j) = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (rel(i, k) > 0 && rel(k, j) > 0) rel(i, j) = 1;
  std::vector<std::vector<int>> out;
  std::vector<bool> seen(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    out.emplace_back();
    for (int j = 0; j < n; ++j)
      if (rel(i, j) > 0) {
        out.back().push_back(j);
        seen[static_cast<std::size_t>(j)] = true;
      }
  }
  return out;
}

// Vectors spread over a random direct sum of subspaces of R^d.
VectorSet block_instance(const std::vector<int>& dims, const std::vector<int>& counts, std::mt19937_64& rng) {
  int d = 0;
  for (int k : dims) d += k;
  std::normal_distribution<double> normal;
  Matrix basis(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) basis(i, j) = normal(rng);
  int n = 0;
  for (int k : counts) n += k;
  Matrix cols(d, n);
  int col = 0, off = 0;
  for (std::size_t b = 0; b < dims.size(); ++b) {
    for (int r = 0; r < counts[b]; ++r) {
      Vector coeff(dims[b]);
      for (int k = 0; k < dims[b]; ++k) coeff[k] = normal(rng);
      cols.col(col++) = basis.middleCols(off, dims[b]) * coeff;
    }
    off += dims[b];
  }
  return VectorSet::from_columns(cols);
}

Vector dirichlet(int n, int d, std::mt19937_64& rng) {
  std::gamma_distribution<double> g(1.0, 1.0);
  Vector c(n);
  for (int i = 0; i < n; ++i) c[i] = g(rng) + 1e-3;
  return c * (d / c.sum());
}

}  // namespace

TEST_CASE("solve_lp: small textbook problems") {
  // max x + y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6.
  Matrix a(2, 4);
  a << 1, 2, 1, 0, 3, 1, 0, 1;
  Vector b(2);
  b << 4, 6;
  Vector cost(4);
  cost << 1, 1, 0, 0;
  const auto r = solve_lp(a, b, cost);
  REQUIRE(r.status == LpResult::Status::optimal);
  CHECK(r.objective == doctest::Approx(2.8));
  CHECK(r.x[0] == doctest::Approx(1.6));
  CHECK(r.x[1] == doctest::Approx(1.2));

  Matrix inf(1, 2);
  inf << 1, 1;
  Vector neg(1);
  neg << -1;
  CHECK(solve_lp(inf, neg, Vector::Zero(2)).status == LpResult::Status::infeasible);

  Matrix unb(1, 2);
  unb << 1, -1;
  Vector zero = Vector::Zero(1);
  Vector up(2);
  up << 1, 0;
  CHECK(solve_lp(unb, zero, up).status == LpResult::Status::unbounded);

  // Duplicate row is redundant.
  Matrix dup(2, 2);
  dup << 1, 1, 1, 1;
  Vector ones = Vector::Ones(2);
  Vector c2(2);
  c2 << 1, 0;
  const auto rd = solve_lp(dup, ones, c2);
  REQUIRE(rd.status == LpResult::Status::optimal);
  CHECK(rd.objective == doctest::Approx(1.0));
}

TEST_CASE("enumerate_bases") {
  const auto std2 = enumerate_bases(rt::standard_basis(2));
  REQUIRE(std2.size() == 1);
  CHECK(std2[0].indices == std::vector<int>{0, 1});
  CHECK(std2[0].delta == doctest::Approx(1.0));

  const auto tri = enumerate_bases(rt::planar_triple(30.0));
  REQUIRE(tri.size() == 3);
  for (const auto& b : tri) CHECK(b.delta == doctest::Approx(0.75).epsilon(1e-14));

  const auto dup = enumerate_bases(rt::from_rows({{1, 0}, {1, 0}, {0.6, 0.8}, {0, 1}}));
  for (const auto& b : dup) CHECK_FALSE((b.indices[0] == 0 && b.indices[1] == 1));
}

TEST_CASE("membership: the three reference verdicts") {
  std::mt19937_64 rng(2);
  const auto gp = rt::random_vectors(7, 3, rng);
  const auto uni = WeightVector::uniform(7, 3);
  CHECK(membership(gp, uni).member == Membership::interior);
  CHECK(membership_lp(gp, uni).member == Membership::interior);

  const auto e112 = rt::from_rows({{1, 0}, {1, 0}, {0, 1}});
  const auto out = membership(e112, WeightVector::uniform(3, 2));
  CHECK(out.member == Membership::outside);
  REQUIRE(out.witness);
  CHECK(out.witness->indices == std::vector<int>{0, 1});
  CHECK(out.witness->c_sum == doctest::Approx(4.0 / 3.0));
  CHECK(out.witness->span_dim == 1);
  CHECK(membership_lp(e112, WeightVector::uniform(3, 2)).member == Membership::outside);

  // Vertex 1_S for S = {1, 3}.
  const auto vertex = weights({1, 0, 1, 0, 0, 0, 1}, 3);
  const auto v = membership(gp, vertex);
  CHECK(v.member == Membership::boundary);
  CHECK(v.witness.has_value());
  CHECK(membership_lp(gp, vertex).member == Membership::boundary);
}

TEST_CASE("membership_lp: planar triple interior and a coordinate above one") {
  CHECK(membership_lp(rt::planar_triple(30.0), WeightVector::uniform(3, 2)).member == Membership::interior);
  std::mt19937_64 rng(4);
  const auto x = rt::random_vectors(4, 2, rng);
  const auto c = weights({1.01, 0.33, 0.33, 0.33}, 2);
  CHECK(membership_lp(x, c).member == Membership::outside);
  CHECK(membership(x, c).member == Membership::outside);
}

TEST_CASE("membership: cap") {
  std::mt19937_64 rng(5);
  const auto x = rt::random_vectors(21, 2, rng);
  CHECK(kind_of([&] { membership(x, WeightVector::uniform(21, 2)); }) == ErrorKind::cap);
}

TEST_CASE("membership: reducible instances are interior when class sums match") {
  const auto std2 = rt::standard_basis(2);
  const auto r = membership(std2, WeightVector::uniform(2, 2));
  CHECK(r.member == Membership::interior);
  CHECK(r.classes.size() == 2);

  const auto e1122 = rt::from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}});
  const auto r2 = membership(e1122, WeightVector::uniform(4, 2));
  CHECK(r2.member == Membership::interior);
  CHECK(r2.classes == std::vector<std::vector<int>>{{0, 1}, {2, 3}});
  CHECK(membership_lp(e1122, WeightVector::uniform(4, 2)).member == Membership::interior);

  const auto e1112 = rt::from_rows({{1, 0}, {1, 0}, {1, 0}, {0, 1}});
  CHECK(membership(e1112, WeightVector::uniform(4, 2)).member == Membership::outside);
}

TEST_CASE("exhaustive and LP membership agree on 50 random instances") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> pick(0, 4);
  int counts[3] = {0, 0, 0};
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 3;
    const int n = d + 1 + (trial * 5) % (12 - d);
    VectorSet x = rt::random_vectors(n, d, rng);
    WeightVector c = WeightVector::uniform(n, d);
    switch (pick(rng)) {
      case 0:
        c = rt::random_interior_weights(n, d, rng);
        break;
      case 1:
        c = WeightVector::from_values(dirichlet(n, d, rng), d);
        break;
      case 2: {
        // Several vectors in one low-dimensional subspace.
        Matrix cols = x.columns();
        const int k = 1 + std::min(2, n - d);
        for (int i = 1; i < k; ++i) cols.col(i) = cols.col(0) + 0.5 * i * cols.col(n - 1);
        x = VectorSet::from_columns(cols);
        break;
      }
      case 3: {
        Vector v = Vector::Zero(n);
        for (int i = 0; i < d; ++i) v[i] = 1.0;
        c = WeightVector::from_values(0.7 * v + 0.3 * Vector::Constant(n, double(d) / n), d);
        break;
      }
      default: {
        Vector v = Vector::Zero(n);
        for (int i = 0; i < d; ++i) v[(i * 2) % n] = 1.0;
        if (v.sum() == d) c = WeightVector::from_values(v, d, WeightDomain::nonnegative);
        break;
      }
    }
    const auto a = membership(x, c);
    const auto b = membership_lp(x, c);
    CHECK(a.member == b.member);
    CHECK(a.classes == b.classes);
    ++counts[static_cast<int>(a.member)];
  }
  CHECK(counts[0] > 0);
  CHECK(counts[1] > 0);
  CHECK(counts[2] > 0);
}

TEST_CASE("equivalence_classes: examples and brute-force relation") {
  const auto std2 = equivalence_classes(rt::standard_basis(2));
  CHECK(std2.members == std::vector<std::vector<int>>{{0}, {1}});
  CHECK(std2.dims == std::vector<int>{1, 1});

  const auto tri = equivalence_classes(rt::planar_triple(30.0));
  CHECK(tri.members == std::vector<std::vector<int>>{{0, 1, 2}});

  std::mt19937_64 rng(8);
  const auto blocks = block_instance({2, 2}, {3, 3}, rng);
  const auto cls = equivalence_classes(blocks);
  CHECK(cls.members == std::vector<std::vector<int>>{{0, 1, 2}, {3, 4, 5}});
  CHECK(cls.dims == std::vector<int>{2, 2});

  for (int trial = 0; trial < 15; ++trial) {
    std::vector<int> dims, counts;
    const int parts = 1 + trial % 3;
    for (int p = 0; p < parts; ++p) {
      dims.push_back(1 + (trial + p) % 2);
      counts.push_back(dims.back() + (trial * 3 + p) % 3);
    }
    const auto x = block_instance(dims, counts, rng);
    CHECK(equivalence_classes(x).members == brute_classes(x));
  }
}

TEST_CASE("circuit_classes matches the basis-exchange relation") {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<int> dims, counts;
    const int parts = 1 + trial % 4;
    for (int p = 0; p < parts; ++p) {
      dims.push_back(1 + (trial + p) % 3);
      counts.push_back(dims.back() + (trial * 5 + p) % 3);
    }
    auto x = block_instance(dims, counts, rng);
    if (trial % 3 == 0) {
      // Interleave the blocks so class order is not column order.
      Matrix cols = x.columns();
      std::vector<int> perm(static_cast<std::size_t>(x.count()));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      Matrix shuffled(cols.rows(), cols.cols());
      for (int i = 0; i < x.count(); ++i) shuffled.col(i) = cols.col(perm[static_cast<std::size_t>(i)]);
      x = VectorSet::from_columns(shuffled);
    }
    const auto a = equivalence_classes(x);
    const auto b = circuit_classes(x);
    CHECK(a.members == b.members);
    CHECK(a.dims == b.dims);
  }
  // Beyond the enumeration cap only the circuit version runs.
  const auto big = block_instance({4, 4}, {20, 20}, rng);
  const auto cls = circuit_classes(big);
  CHECK(cls.members.size() == 2);
  CHECK(cls.dims == std::vector<int>{4, 4});
}

TEST_CASE("affine hull of the vertices has dimension n - #classes") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    VectorSet x = rt::random_vectors(5 + trial % 3, 2 + trial % 2, rng);
    if (trial % 2 == 1) {
      std::vector<int> dims = {1 + trial % 2, 1 + (trial / 2) % 2};
      std::vector<int> counts = {dims[0] + 1, dims[1] + trial % 3};
      if (trial % 4 == 3) {
        dims.push_back(1);
        counts.push_back(2);
      }
      x = block_instance(dims, counts, rng);
    }
    const auto bases = enumerate_bases(x);
    const int n = x.count();
    Matrix v(static_cast<Eigen::Index>(bases.size()), n);
    v.setZero();
    for (std::size_t s = 0; s < bases.size(); ++s)
      for (int i : bases[s].indices) v(static_cast<Eigen::Index>(s), i) = 1.0;
    const Matrix centered = v.rowwise() - v.row(0);
    Eigen::FullPivLU<Matrix> lu(centered);
    lu.setThreshold(1e-9);
    CHECK(static_cast<int>(lu.rank()) == n - static_cast<int>(equivalence_classes(x).members.size()));
  }
}

TEST_CASE("decompose") {
  std::mt19937_64 rng(10);
  const auto irr = rt::random_vectors(5, 2, rng);
  const auto one = decompose(irr, WeightVector::uniform(5, 2));
  CHECK(one.parts.size() == 1);
  CHECK(one.pre_map.isApprox(Matrix::Identity(2, 2)));

  const auto e1122 = rt::from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}});
  const auto two = decompose(e1122, WeightVector::uniform(4, 2));
  REQUIRE(two.parts.size() == 2);
  for (const auto& p : two.parts) {
    CHECK(p.vectors.dim() == 1);
    CHECK(p.vectors.count() == 2);
    CHECK(p.weights[0] == doctest::Approx(0.5));
    CHECK(p.weights[1] == doctest::Approx(0.5));
  }

  const auto e1112 = rt::from_rows({{1, 0}, {1, 0}, {1, 0}, {0, 1}});
  CHECK(kind_of([&] { decompose(e1112, WeightVector::uniform(4, 2)); }) == ErrorKind::infeasible);

  // Skewed direct sum: class spans become orthogonal after the pre-map.
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = block_instance({2, 1, 2}, {4, 2, 3}, rng);
    Vector c(9);
    c << 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 2.0 / 3, 2.0 / 3, 2.0 / 3;
    const auto dec = decompose(x, WeightVector::from_values(c, 5));
    REQUIRE(dec.parts.size() == 3);
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = j + 1; k < 3; ++k)
        CHECK((dec.parts[j].frame.transpose() * dec.parts[k].frame).norm() < 1e-9);
  }
}

TEST_CASE("deepness: planar triple certificate and refusal") {
  for (double theta : {10.0, 15.0, 20.0, 25.0}) {
    const auto x = rt::planar_triple(theta);
    const auto c = WeightVector::uniform(3, 2);
    const double s = std::sin(theta * std::numbers::pi / 180.0);
    CHECK(deepness_eta(x, c, 0.9 * s).eta == doctest::Approx(1.0 / 3.0));
    CHECK(deepness_eta(x, c, s * 1.01).eta < 0.0);
    const auto cert = deepness_estimate(x, c);
    CHECK(cert.eta == doctest::Approx(1.0 / 3.0));
    CHECK(cert.delta < s);
    CHECK(cert.heuristic);
    CHECK(cert.checked_subspaces > 0);
    CHECK(cert.t_inf >= rt::triple_closed_form(theta).maxCoeff());
  }
  const auto cert15 = deepness_estimate(rt::planar_triple(15.0), WeightVector::uniform(3, 2));
  CHECK(cert15.delta == 0.25);
  CHECK(cert15.t_inf == doctest::Approx(std::log(1.5) + std::log(384.0)));

  const auto std2 = rt::standard_basis(2);
  const auto ones = WeightVector::uniform(2, 2);
  CHECK(deepness_eta(std2, ones, 0.1).eta == doctest::Approx(0.0));
  CHECK(kind_of([&] { deepness_estimate(std2, ones); }) == ErrorKind::degenerate);

  // d = 1 has no proper subspaces.
  const auto line = VectorSet::from_columns(Matrix::Ones(1, 3));
  CHECK(deepness_estimate(line, WeightVector::uniform(3, 1)).eta == 1.0);
}

TEST_CASE("deepness certificate invariant over its candidates") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = rt::random_vectors(6, 3, rng);
    const auto c = rt::random_interior_weights(6, 3, rng);
    const auto cert = deepness_estimate(x, c);
    // Re-check every coordinate line pair/singleton span independently.
    for (int i = 0; i < 6; ++i) {
      const Vector e = x.column(i);
      double s = 0.0;
      for (int j = 0; j < 6; ++j) {
        const Vector r = x.column(j) - e * e.dot(x.column(j));
        if (r.norm() <= cert.delta) s += c[j];
      }
      CHECK(s <= 1.0 * (1.0 - cert.eta) + 1e-12);
    }
  }
}

TEST_CASE("t_inf_bound, hm_bound, gamma, hm_to_deepness") {
  CHECK(t_inf_bound(2.0 / 3.0, 1.0 / 3.0, 0.25, 2) == doctest::Approx(6.356).epsilon(1e-4));
  const auto u = WeightVector::uniform(8, 3);
  CHECK(t_inf_bound(u, 0.5, 0.5, 1) == doctest::Approx(std::log(8.0 / 3.0)));
  CHECK(t_inf_bound(u, 0.5, 0.5, 3) - 2 * std::log(8.0 / (0.5 * 0.25)) == doctest::Approx(std::log(8.0 / 3.0)));

  CHECK(hm_bound(rt::planar_triple(30.0), 1.0 / 3.0) == doctest::Approx(3.0 * std::log(3.0)).epsilon(1e-12));
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) CHECK(hm_bound(rt::random_vectors(6, 3, rng), 0.1) >= 0.0);
  CHECK(hm_bound(rt::standard_basis(3), 0.5) == 0.0);

  CHECK(gamma_general_position(WeightVector::uniform(6, 2), rt::random_vectors(6, 2, rng)) ==
        doctest::Approx(1.0 / 6.0));
  CHECK(gamma_general_position(weights({0.5, 0.5, 0.5, 0.5}, 2), rt::random_vectors(4, 2, rng)) ==
        doctest::Approx(0.25));
  CHECK(kind_of([&] { gamma_general_position(weights({0.9, 0.4, 0.4, 0.3}, 2), rt::random_vectors(4, 2, rng)); }) ==
        ErrorKind::precondition);
  CHECK(kind_of([&] {
          gamma_general_position(WeightVector::uniform(4, 2), rt::from_rows({{1, 0}, {1, 0}, {0, 1}, {0.6, 0.8}}));
        }) == ErrorKind::precondition);

  const auto hm = hm_to_deepness(1.0 / 3.0, 0.75, 2);
  CHECK(hm.eta == doctest::Approx(1.0 / 3.0));
  CHECK(hm.delta == doctest::Approx(std::sqrt(0.75) / 4.0));
  CHECK(hm.t_inf == doctest::Approx(std::log(1.5) + std::log(512.0)));
  CHECK(hm.t_inf == doctest::Approx(6.64).epsilon(1e-3));
  CHECK(hm_to_deepness(0.5, 1.0, 1).t_inf == doctest::Approx(std::log(2.0)));
}

TEST_CASE("HM-derived t_inf dominates t_inf_bound at the HM (eta, delta)") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + trial % 3;
    const auto x = rt::random_vectors(d + 2 + trial % 3, d, rng);
    const auto c = WeightVector::uniform(x.count(), d);
    const auto bases = enumerate_bases(x);
    double lo = 1.0;
    for (const auto& b : bases) lo = std::min(lo, b.delta);
    const double gamma = gamma_general_position(c, x);
    const auto hm = hm_to_deepness(gamma, lo, d);
    CHECK(hm.t_inf >= t_inf_bound(c, hm.eta, hm.delta, d) - 1e-12);
  }
}

TEST_CASE("alpha_bounds: formula values") {
  const auto b = alpha_bounds(rt::planar_triple(30.0), 1.0 / 3.0, 0.25, 0.0, 0.75);
  REQUIRE(b.alpha_gp);
  CHECK(*b.alpha_gp == doctest::Approx(0.1875).epsilon(1e-14));
  CHECK(*b.kappa_gp == doctest::Approx(0.5 / 0.1875));
  const double expect = 0.0625 / (2.0 * 81.0 * std::pow(1.0 + std::sqrt(3.0) / 0.25, 4));
  CHECK(b.alpha_general == doctest::Approx(expect).epsilon(1e-12));
  CHECK(b.alpha_general == doctest::Approx(9.9e-8).epsilon(0.05));
  CHECK(b.kappa_general == doctest::Approx(0.5 / expect).epsilon(1e-12));

  CHECK_FALSE(alpha_bounds(rt::standard_basis(2), 0.5, 0.5, 0.0, 1.0).alpha_gp.has_value());
  const auto huge = alpha_bounds(40, 8, 0.1, 1e-3, 900.0, std::nullopt);
  CHECK(huge.alpha_general == 0.0);
  CHECK(std::isfinite(huge.log_alpha_general));
}

TEST_CASE("alpha soundness: min eigenvalue on the complement of 1 dominates both bounds") {
  std::mt19937_64 rng(15);
  int checked = 0;
  for (int trial = 0; trial < 8; ++trial) {
    const int d = 2 + trial % 2;
    const int n = d + 2 + trial % 3;
    const auto x = rt::random_vectors(n, d, rng);
    const auto c = WeightVector::uniform(n, d);
    const auto cert = deepness_estimate(x, c);
    const auto bases = enumerate_bases(x);
    double lo = 1.0;
    for (const auto& b : bases) lo = std::min(lo, b.delta);
    for (int k = 0; k < 10; ++k) {
      Vector t = rt::random_t(n, 1.0, rng);
      t.array() -= t.mean();
      const double range = t.maxCoeff() - t.minCoeff();
      const double lam = min_eigenvalue_on_e0(hessian(assemble(x, {t})));
      const auto ab = alpha_bounds(x, cert.eta, cert.delta, range, lo);
      CHECK(lam >= ab.alpha_general);
      CHECK(lam >= *ab.alpha_gp);
      ++checked;
    }
  }
  CHECK(checked == 80);
}

TEST_CASE("xi_estimate") {
  std::mt19937_64 rng(16);
  const auto blocks = block_instance({2, 2}, {3, 3}, rng);
  const auto gb = assemble(blocks, {Vector::Zero(6)});
  const auto xb = xi_estimate(gb);
  CHECK(xb.exact);
  CHECK(xb.value < 1e-12);

  const auto g30 = assemble(rt::planar_triple(30.0), {Vector::Zero(3)});
  const auto x30 = xi_estimate(g30);
  CHECK(x30.exact);
  CHECK(x30.partitions == 3);
  CHECK(x30.value > 0.0);
  CHECK(min_eigenvalue_on_e0(hessian(g30)) >= x30.value / 27.0);

  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + trial % 6;
    const auto x = rt::random_vectors(n, 3, rng);
    const auto g = assemble(x, {rt::random_t(n, 2.0, rng)});
    const auto xi = xi_estimate(g);
    const HessianMatrix h = hessian(g);
    CHECK(xi.value <= h.diagonal().minCoeff() + 1e-12);
    CHECK(min_eigenvalue_on_e0(h) >= xi.value / (n * n * n) - 1e-14);
    const auto sampled = xi_estimate(g, 0, 0);
    CHECK(sampled.value >= xi.value - 1e-14);
  }
}

TEST_CASE("xi_estimate sampling mode on a larger instance") {
  std::mt19937_64 rng(17);
  const auto x = rt::random_vectors(24, 3, rng);
  const auto g = assemble(x, {Vector::Zero(24)});
  const auto xi = xi_estimate(g, 2000, 7);
  CHECK_FALSE(xi.exact);
  CHECK(xi.partitions >= 24);
  CHECK(xi.value <= hessian(g).diagonal().minCoeff() + 1e-12);
  CHECK(xi_estimate(g, 2000, 7).value == xi.value);
}

TEST_CASE("compute_bounds fills what it can") {
  const auto r = compute_bounds(rt::planar_triple(30.0), WeightVector::uniform(3, 2));
  REQUIRE(r.deepness);
  REQUIRE(r.gamma);
  CHECK(*r.gamma == doctest::Approx(1.0 / 3.0));
  CHECK(*r.delta_s_min == doctest::Approx(0.75));
  CHECK(*r.t_inf_hm == doctest::Approx(3.0 * std::log(3.0)));
  REQUIRE(r.alpha);
  CHECK(r.alpha->alpha_gp.has_value());
  CHECK(r.beta == 0.5);

  const auto s = compute_bounds(rt::standard_basis(2), WeightVector::uniform(2, 2));
  CHECK_FALSE(s.deepness);
  CHECK_FALSE(s.gamma);
  CHECK_FALSE(s.alpha);
  CHECK(s.notes.size() >= 2);
}
