#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "radiso/cli.hpp"
#include "radiso/error.hpp"
#include "radiso/oracle.hpp"

namespace radiso::cli {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::parse, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with_csv(const std::string& path) {
  if (path.size() < 4) return false;
  std::string ext = path.substr(path.size() - 4);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".csv";
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Exhaustive test when small enough, otherwise the LP over bases.
std::pair<PolytopeReport, std::string> classify(const Instance& inst) {
  if (inst.vectors.count() <= kMembershipMaxCount) return {membership(inst.vectors, inst.weights), "exhaustive"};
  return {membership_lp(inst.vectors, inst.weights), "lp"};
}

json try_verdicts(const Instance& inst) {
  try {
    const auto [r, test] = classify(inst);
    return report::verdicts(r, test);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::cap) throw;
    return {{"membership", "unknown"}, {"test", "none"}, {"note", e.what()}};
  }
}

DescentConfig make_config(const Options& opts, const BoundReport& bounds) {
  DescentConfig cfg;
  const auto method = parse_method(opts.method);
  if (!method) throw Error(ErrorKind::precondition, "unknown method '" + opts.method + "'");
  cfg.method = *method;
  cfg.eps = opts.eps;
  cfg.max_iters = opts.max_iters;
  cfg.region_bound = opts.region_bound;
  if (opts.svd_tol) {
    cfg.svd_tol_policy = SvdTolPolicy::fixed;
    cfg.svd_tol = *opts.svd_tol;
  }
  if (opts.alpha) {
    if (*opts.alpha == "auto") {
      if (!bounds.alpha) throw Error(ErrorKind::missing_alpha, "no alpha lower bound is available for this instance");
      double a = bounds.alpha->alpha_general;
      if (bounds.alpha->alpha_gp) a = std::max(a, *bounds.alpha->alpha_gp);
      if (!(a > 0.0)) throw Error(ErrorKind::missing_alpha, "the alpha lower bound underflows to zero");
      cfg.alpha = std::min(a, cfg.beta);
    } else {
      try {
        std::size_t used = 0;
        cfg.alpha = std::stod(*opts.alpha, &used);
        if (used != opts.alpha->size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw Error(ErrorKind::parse, "--alpha expects 'auto' or a number");
      }
    }
  }
  validate(cfg);
  return cfg;
}

json base_document(const Instance& inst, const Options& opts) {
  return {{"instance", report::digest(inst)}, {"provenance", report::provenance(opts)}};
}

}  // namespace

Instance load_instance(const Options& opts) {
  const std::string text = read_file(opts.in);
  std::optional<WeightSpec> weights;
  if (opts.c) weights = WeightSpec::parse(*opts.c);
  const auto format = ends_with_csv(opts.in) ? InstanceFormat::csv : InstanceFormat::json;
  return parse_instance(text, format, weights, WeightDomain::nonnegative);
}

Outcome cmd_solve(const Options& opts) {
  const Instance inst = load_instance(opts);
  const BoundReport bounds = compute_bounds(inst.vectors, inst.weights);
  const DescentConfig cfg = make_config(opts, bounds);
  json doc = base_document(inst, opts);
  doc["bounds"] = report::bounds(bounds);

  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](json& solver) {
    if (opts.timing) {
      solver["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  try {
    const IsotropyResult r = solve(inst.vectors, inst.weights, cfg);
    json solver = report::result(r);
    finish(solver);
    doc["solver"] = solver;
    doc["transform"] = report::transform(r.transform);
    doc["verdicts"] = try_verdicts(inst);
    const bool good = r.isotropy_residual <= opts.eps;
    doc["status"] = good ? "converged" : "non_convergence";
    return {good ? ExitCode::ok : ExitCode::not_converged, report::render(doc)};
  } catch (const InfeasibleError& e) {
    doc["verdicts"] = report::verdicts(e.report(), "exhaustive");
    doc["status"] = "infeasible";
    doc["message"] = e.what();
    return {ExitCode::infeasible, report::render(doc)};
  } catch (const NonConvergenceError& e) {
    json solver = report::result(e.best());
    finish(solver);
    doc["solver"] = solver;
    doc["transform"] = report::transform(e.best().transform);
    doc["status"] = "non_convergence";
    doc["message"] = e.what();
    return {ExitCode::not_converged, report::render(doc)};
  }
}

Outcome cmd_check(const Options& opts) {
  const Instance inst = load_instance(opts);
  const auto [r, test] = classify(inst);
  json doc = base_document(inst, opts);
  doc["verdicts"] = report::verdicts(r, test);
  const int code = r.member == Membership::interior   ? ExitCode::ok
                   : r.member == Membership::boundary ? ExitCode::infeasible
                                                      : ExitCode::not_converged;
  return {code, report::render(doc)};
}

Outcome cmd_bounds(const Options& opts) {
  const Instance inst = load_instance(opts);
  json doc = base_document(inst, opts);
  doc["bounds"] = report::bounds(compute_bounds(inst.vectors, inst.weights));
  const auto xi = xi_estimate(assemble(inst.vectors, {Vector::Zero(inst.vectors.count())}), 100'000, opts.seed);
  doc["xi_at_zero"] = {{"value", xi.value}, {"exact", xi.exact}, {"partitions", xi.partitions}};
  return {ExitCode::ok, report::render(doc)};
}

Outcome cmd_verify(const Options& opts) {
  const Instance inst = load_instance(opts);
  json tdoc;
  try {
    tdoc = json::parse(read_file(opts.transform));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, std::string("transform file: ") + e.what());
  }
  const Matrix m = report::parse_transform(tdoc);
  if (m.rows() != inst.vectors.dim()) throw Error(ErrorKind::dimension, "transform size does not match d");
  const auto t = Transformation::make(m, TransformProvenance::sigma_inv_vt);
  const double residual = transformation_residual(inst.vectors, inst.weights, t);
  json doc = base_document(inst, opts);
  doc["residual"] = residual;
  doc["eps"] = opts.eps;
  doc["within_eps"] = residual <= opts.eps;
  return {ExitCode::ok, report::render(doc)};
}

Outcome cmd_trace(const Options& opts) {
  const Instance inst = load_instance(opts);
  const BoundReport bounds = compute_bounds(inst.vectors, inst.weights);
  DescentConfig cfg = make_config(opts, bounds);
  cfg.record_trace = true;

  std::optional<double> f_star;
  try {
    const auto ref = newton_reference(inst.vectors, inst.weights);
    f_star = f_value(assemble(inst.vectors, ref.t_star), inst.weights);
  } catch (const Error&) {
  }

  json doc = base_document(inst, opts);
  IsotropyResult r;
  int code = ExitCode::ok;
  try {
    r = descend(inst.vectors, inst.weights, cfg);
  } catch (const InfeasibleError& e) {
    doc["verdicts"] = report::verdicts(e.report(), "exhaustive");
    doc["status"] = "infeasible";
    doc["message"] = e.what();
    return {ExitCode::infeasible, report::render(doc)};
  } catch (const NonConvergenceError& e) {
    r = e.best();
    code = ExitCode::not_converged;
  }

  if (opts.plot) {
    std::string csv = "iteration,f_gap,grad_norm\n";
    for (const auto& e : r.trace) {
      csv += std::to_string(e.iteration) + ",";
      if (f_star) csv += shortest(e.f - *f_star);
      csv += "," + shortest(e.grad_norm) + "\n";
    }
    return {code, csv};
  }
  json rows = json::array();
  for (const auto& e : r.trace) {
    rows.push_back({{"iteration", e.iteration},
                    {"f", e.f},
                    {"f_gap", f_star ? json(e.f - *f_star) : json(nullptr)},
                    {"grad_norm", e.grad_norm}});
  }
  doc["f_star"] = f_star ? json(*f_star) : json(nullptr);
  doc["solver"] = report::result(r);
  doc["trace"] = rows;
  doc["status"] = code == ExitCode::ok ? "converged" : "non_convergence";
  return {code, report::render(doc)};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radial isotropic position solver", "radiso"};
  app.require_subcommand(1);
  Options opts;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--in", opts.in, "instance file (.json or .csv)")->required();
    sub->add_option("--c", opts.c, "weights: uniform or comma separated values");
    sub->add_option("--eps", opts.eps, "target residual");
    sub->add_option("--out", opts.out, "write the report here instead of stdout");
    sub->add_option("--seed", opts.seed, "seed for sampled estimates");
  };
  auto solver = [&](CLI::App* sub) {
    sub->add_option("--method", opts.method,
                    "smooth, smooth_nesterov, strongly_convex, strongly_convex_nesterov, newton_oracle");
    sub->add_option("--alpha", opts.alpha, "strong convexity modulus: auto or a number");
    sub->add_option("--max-iters", opts.max_iters, "iteration cap");
    sub->add_option("--region-bound", opts.region_bound, "|t|_inf cap of the search region");
    sub->add_option("--svd-tol", opts.svd_tol, "fixed singular value tolerance");
  };

  auto* solve_cmd = app.add_subcommand("solve", "compute a radial isotropic transformation");
  common(solve_cmd);
  solver(solve_cmd);
  solve_cmd->add_flag("--timing", opts.timing, "report wall time");
  auto* check_cmd = app.add_subcommand("check", "basis polytope membership and decomposition");
  common(check_cmd);
  auto* bounds_cmd = app.add_subcommand("bounds", "bounds on |t*|_inf and strong convexity");
  common(bounds_cmd);
  auto* verify_cmd = app.add_subcommand("verify", "isotropy residual of a given transform");
  common(verify_cmd);
  verify_cmd->add_option("--transform", opts.transform, "transform JSON or solve report")->required();
  auto* trace_cmd = app.add_subcommand("trace", "per-iteration descent diagnostics");
  common(trace_cmd);
  solver(trace_cmd);
  trace_cmd->add_flag("--plot", opts.plot, "emit CSV: iteration, f_gap, grad_norm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ExitCode::ok : ExitCode::failure;
  }

  Outcome result;
  try {
    if (*solve_cmd) result = cmd_solve(opts);
    else if (*check_cmd) result = cmd_check(opts);
    else if (*bounds_cmd) result = cmd_bounds(opts);
    else if (*verify_cmd) result = cmd_verify(opts);
    else result = cmd_trace(opts);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return ExitCode::failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::failure;
  }

  if (opts.out) {
    std::ofstream f(*opts.out, std::ios::binary);
    if (!f || !(f << result.body)) {
      err << "error: cannot write " << *opts.out << "\n";
      return ExitCode::failure;
    }
  } else {
    out << result.body;
  }
  return result.exit_code;
}

}  // namespace radiso::cli
