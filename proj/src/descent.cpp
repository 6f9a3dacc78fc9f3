#include "radiso/descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include "radiso/combinatorics.hpp"
#include "radiso/oracle.hpp"
#include "radiso/polytope.hpp"

namespace radiso {

namespace {

constexpr int kBisectionSteps = 200;

bool is_strongly_convex(Method m) {
  return m == Method::strongly_convex || m == Method::strongly_convex_nesterov;
}

std::string describe(const PolytopeReport& report) {
  std::ostringstream msg;
  msg << "c is " << to_string(report.member) << " of the basis polytope";
  if (report.witness) {
    msg.precision(17);
    msg << ": subset {";
    for (std::size_t k = 0; k < report.witness->indices.size(); ++k) {
      msg << (k ? "," : "") << report.witness->indices[k] + 1;
    }
    msg << "} has weight " << report.witness->c_sum << " against span dimension " << report.witness->span_dim;
  }
  return msg.str();
}

// Exhaustive check when small, LP when the bases are enumerable, nothing
// otherwise.
std::optional<PolytopeReport> feasibility(const VectorSet& x, const WeightVector& c,
                                          std::vector<std::string>& warnings) {
  if (x.count() <= kMembershipMaxCount) return membership(x, c);
  try {
    return membership_lp(x, c);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::cap) throw;
    warnings.push_back("membership not checked: too many bases to enumerate");
    return std::nullopt;
  }
}

void gate(const VectorSet& x, const WeightVector& c, const DescentConfig& cfg, std::vector<std::string>& warnings) {
  if (cfg.force) return;
  const auto report = feasibility(x, c, warnings);
  if (report && report->member != Membership::interior) throw InfeasibleError(describe(*report), *report);
  if (!is_strongly_convex(cfg.method)) return;
  const std::size_t classes = report ? report->classes.size() : circuit_classes(x).members.size();
  if (classes > 1) {
    throw Error(ErrorKind::reducible, "strong convexity fails on a reducible instance; decompose it first");
  }
}

double svd_tol_for(const DescentConfig& cfg, const VectorSet& x, const Vector& t) {
  if (cfg.svd_tol_policy == SvdTolPolicy::fixed) return cfg.svd_tol;
  // |X(t)|_F^2 = sum_i e^{t_i} for unit columns.
  const double hi = t.maxCoeff();
  const double log_fro = 0.5 * (hi + std::log((t.array() - hi).exp().sum()));
  (void)x;
  return std::exp(3.0 * std::log(cfg.eps) - log_fro);
}

Vector min_zero(Vector t) {
  t.array() -= t.minCoeff();
  return t;
}

// Everything the result needs from a final t.
IsotropyResult finish(const VectorSet& x, const WeightVector& c, const Vector& t, const DescentConfig& cfg) {
  IsotropyResult r;
  r.method = cfg.method;
  r.t_apx = {min_zero(t), Normalization::min_zero};
  const auto g = assemble(x, r.t_apx);
  r.c_apx = grad_phi(g);
  r.grad_norm = (r.c_apx - c.values()).norm();
  const Matrix map =
      cfg.transform_form == TransformProvenance::q_inv_sqrt_symmetric ? q_inv_sqrt_symmetric(g) : q_inv_sqrt_svd(g);
  r.transform = Transformation::make(map, cfg.transform_form);
  r.isotropy_residual = isotropy_residual(x, c.values(), map);
  return r;
}

IsotropyResult run(const VectorSet& x, const WeightVector& c, const DescentConfig& cfg, const Region& region,
                   const GradientProvider& step_gradient, std::vector<std::string> warnings) {
  const int n = x.count();
  const bool accelerated = cfg.method == Method::smooth_nesterov;
  double momentum = 0.0;
  if (cfg.method == Method::strongly_convex_nesterov) momentum = strongly_convex_momentum(cfg.beta / *cfg.alpha);

  Vector t = Vector::Zero(n);
  Vector zeta_prev = t;
  double lam = nesterov_lambda(1);
  double lam_next = nesterov_lambda(2);

  std::vector<TraceEntry> trace;
  Vector best_t = t;
  double best_norm = std::numeric_limits<double>::infinity();

  for (int it = 0;; ++it) {
    const auto g = assemble(x, {t}, svd_tol_for(cfg, x, t));
    const Vector p = grad_phi(g);
    const Vector grad = p - c.values();
    const double gn = grad.norm();
    if (cfg.record_trace) trace.push_back({it + 1, f_value(g, c), gn, t});
    if (gn < best_norm) {
      best_norm = gn;
      best_t = t;
    }
    const double stop = cfg.eps * std::min(1.0, std::sqrt(std::max(p.minCoeff(), 0.0)));
    const bool done = gn <= stop;
    if (done || it == cfg.max_iters) {
      if (!done && !cfg.allow_max_iters) {
        auto best = finish(x, c, best_t, cfg);
        best.iterations = it;
        best.warnings = warnings;
        best.trace = std::move(trace);
        std::ostringstream msg;
        msg.precision(3);
        msg << "no convergence after " << it << " iterations (best |grad f| = " << best_norm << ")";
        throw NonConvergenceError(msg.str(), std::move(best));
      }
      if (!done) warnings.push_back("stopped at max_iters before reaching eps");
      auto r = finish(x, c, t, cfg);
      r.iterations = it;
      r.trace = std::move(trace);
      r.warnings = std::move(warnings);
      return r;
    }

    const Vector step = step_gradient ? step_gradient(t) : grad;
    const Vector zeta = project_region(t - step / cfg.beta, region);
    if (accelerated) {
      const double gamma = (1.0 - lam) / lam_next;
      t = (1.0 - gamma) * zeta + gamma * zeta_prev;
      lam = lam_next;
      lam_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * lam_next * lam_next));
    } else if (momentum != 0.0) {
      t = (1.0 + momentum) * zeta - momentum * zeta_prev;
    } else {
      t = zeta;
    }
    zeta_prev = zeta;
  }
}

IsotropyResult method_entry(const VectorSet& x, const WeightVector& c, DescentConfig cfg, Method method,
                            const GradientProvider& step_gradient) {
  cfg.method = method;
  validate(cfg);
  if (is_strongly_convex(method) && !cfg.alpha) {
    throw Error(ErrorKind::missing_alpha, "strongly convex methods need alpha");
  }
  if (c.size() != x.count()) throw Error(ErrorKind::dimension, "weights do not match the vector count");
  std::vector<std::string> warnings;
  gate(x, c, cfg, warnings);
  const double bound = cfg.region_bound ? *cfg.region_bound : default_region_bound(x, c, warnings);
  const Region region{is_strongly_convex(method) ? RegionKind::projected_E0 : RegionKind::box_positive, bound};
  return run(x, c, cfg, region, step_gradient, std::move(warnings));
}

}  // namespace

Vector project_region(const Vector& t, const Region& region) {
  const double b = region.bound;
  if (region.kind == RegionKind::box_positive) return t.cwiseMax(0.0).cwiseMin(b);

  Vector w = t.array() - t.mean();
  if (w.size() == 0 || w.maxCoeff() - w.minCoeff() <= b) return w;
  // h(lo) = sum(clamp(w, lo, lo + b) - w) is nondecreasing; its root gives
  // the window whose clamp stays in the zero-mean hyperplane.
  auto h = [&](double lo) { return (w.cwiseMax(lo).cwiseMin(lo + b) - w).sum(); };
  double a = w.minCoeff();
  double z = w.maxCoeff() - b;
  for (int k = 0; k < kBisectionSteps && z - a > 0.0; ++k) {
    const double mid = 0.5 * (a + z);
    if (mid <= a || mid >= z) break;
    (h(mid) < 0.0 ? a : z) = mid;
  }
  const double lo = 0.5 * (a + z);
  Vector p = w.cwiseMax(lo).cwiseMin(lo + b);
  p.array() -= p.mean();
  return p;
}

void validate(const DescentConfig& cfg) {
  if (!(cfg.eps > 0.0)) throw Error(ErrorKind::precondition, "eps must be positive");
  if (!(cfg.beta > 0.0)) throw Error(ErrorKind::precondition, "beta must be positive");
  if (cfg.max_iters < 0) throw Error(ErrorKind::precondition, "max_iters must be nonnegative");
  if (cfg.region_bound && !(*cfg.region_bound > 0.0)) {
    throw Error(ErrorKind::precondition, "region bound must be positive");
  }
  if (cfg.alpha && !(*cfg.alpha > 0.0 && *cfg.alpha <= cfg.beta)) {
    throw Error(ErrorKind::precondition, "alpha must lie in (0, beta]");
  }
  if (cfg.svd_tol_policy == SvdTolPolicy::fixed && !(cfg.svd_tol >= 0.0)) {
    throw Error(ErrorKind::precondition, "svd tolerance must be nonnegative");
  }
}

GradientProvider svd_gradient(const VectorSet& x, const WeightVector& c) {
  return [x, c](const Vector& t) -> Vector { return grad_f(assemble(x, {t}), c); };
}

GradientProvider perturbed_gradient_wrapper(GradientProvider inner, double eps, std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [inner = std::move(inner), eps, rng](const Vector& t) -> Vector {
    Vector g = inner(t);
    if (eps == 0.0) return g;
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector dir(g.size());
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = normal(*rng);
    const double len = dir.norm();
    if (len == 0.0) return g;
    return g + (eps * eps * g.norm() * unit(*rng) / len) * dir;
  };
}

double nesterov_lambda(int m) {
  double lam = 0.0;
  for (int k = 1; k <= m; ++k) lam = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * lam * lam));
  return lam;
}

double nesterov_gamma(int m) { return (1.0 - nesterov_lambda(m)) / nesterov_lambda(m + 1); }

double strongly_convex_momentum(double kappa) {
  const double r = std::sqrt(kappa);
  return (r - 1.0) / (r + 1.0);
}

IsotropyResult smooth_gd(const VectorSet& x, const WeightVector& c, const DescentConfig& cfg) {
  return method_entry(x, c, cfg, Method::smooth, {});
}

IsotropyResult smooth_nesterov(const VectorSet& x, const WeightVector& c, const DescentConfig& cfg) {
  return method_entry(x, c, cfg, Method::smooth_nesterov, {});
}

IsotropyResult strongly_convex_gd(const VectorSet& x, const WeightVector& c, const DescentConfig& cfg) {
  return method_entry(x, c, cfg, Method::strongly_convex, {});
}

IsotropyResult strongly_convex_nesterov(const VectorSet& x, const WeightVector& c, const DescentConfig& cfg) {
  return method_entry(x, c, cfg, Method::strongly_convex_nesterov, {});
}

IsotropyResult descend(const VectorSet& x, const WeightVector& c, const DescentConfig& cfg,
                       const GradientProvider& step_gradient) {
  if (cfg.method == Method::newton_oracle) {
    throw Error(ErrorKind::precondition, "the Newton oracle is not a descent method; use solve");
  }
  return method_entry(x, c, cfg, cfg.method, step_gradient);
}

double default_region_bound(const VectorSet& x, const WeightVector& c, std::vector<std::string>& warnings) {
  try {
    return deepness_estimate(x, c).t_inf;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::cap && e.kind() != ErrorKind::degenerate) throw;
  }
  try {
    const auto bases = enumerate_bases(x);
    const double gamma = gamma_general_position(c, x.dim(), bases, x.count());
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& b : bases) lo = std::min(lo, b.delta);
    return hm_to_deepness(gamma, lo, x.dim()).t_inf;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::cap && e.kind() != ErrorKind::precondition) throw;
  }
  warnings.push_back("no |t*| bound available; region bound falls back to 700");
  return kFallbackRegionBound;
}

IsotropyResult solve(const VectorSet& x, const WeightVector& c, const DescentConfig& cfg) {
  validate(cfg);
  if (c.size() != x.count()) throw Error(ErrorKind::dimension, "weights do not match the vector count");
  if (is_strongly_convex(cfg.method) && !cfg.alpha) {
    throw Error(ErrorKind::missing_alpha, "strongly convex methods need alpha");
  }
  std::vector<std::string> warnings;
  std::optional<PolytopeReport> report;
  if (!cfg.force) {
    report = feasibility(x, c, warnings);
    if (report && report->member != Membership::interior) throw InfeasibleError(describe(*report), *report);
  }

  EquivalenceClasses classes;
  if (report) {
    classes.members = report->classes;
    classes.dims = report->class_dims;
  } else {
    try {
      classes = equivalence_classes(x);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::cap) throw;
      classes = circuit_classes(x);
    }
  }

  DescentConfig inner = cfg;
  inner.force = true;
  auto solve_block = [&](const VectorSet& xb, const WeightVector& cb) -> IsotropyResult {
    DescentConfig local = inner;
    std::vector<std::string> notes;
    if (!local.region_bound) local.region_bound = default_region_bound(xb, cb, notes);
    IsotropyResult r;
    if (cfg.method == Method::newton_oracle) {
      const auto ref = newton_reference(xb, cb);
      r.t_apx = ref.t_star;
      r.iterations = ref.iterations;
    } else {
      r = descend(xb, cb, local, {});
    }
    r.warnings.insert(r.warnings.begin(), notes.begin(), notes.end());
    return r;
  };

  Vector t(x.count());
  int iterations = 0;
  std::vector<TraceEntry> trace;
  if (classes.members.size() == 1) {
    auto r = solve_block(x, c);
    t = r.t_apx.entries;
    iterations = r.iterations;
    trace = std::move(r.trace);
    warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
  } else {
    const auto dec = decompose(x, c, classes);
    const Matrix y = dec.pre_map * x.columns();
    for (const auto& part : dec.parts) {
      auto r = solve_block(part.vectors, part.weights);
      iterations += r.iterations;
      for (std::size_t k = 0; k < part.indices.size(); ++k) {
        const int i = part.indices[k];
        t[i] = r.t_apx.entries[static_cast<Eigen::Index>(k)] - 2.0 * std::log(y.col(i).norm());
      }
      warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
    }
    if (cfg.record_trace) warnings.push_back("trace is not recorded for reducible instances");
  }

  auto result = finish(x, c, t, cfg);
  result.iterations = iterations;
  result.trace = std::move(trace);
  result.warnings = std::move(warnings);
  if (result.isotropy_residual > 2.0 * cfg.eps) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "isotropy residual " << result.isotropy_residual << " exceeds 2 eps";
    if (!cfg.allow_max_iters) throw NonConvergenceError(msg.str(), std::move(result));
    result.warnings.push_back(msg.str());
  }
  return result;
}

}  // namespace radiso
