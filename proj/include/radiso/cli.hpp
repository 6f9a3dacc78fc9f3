#pragma once

// Batch front end: every verb reads an instance file and produces a JSON
// report (or CSV for `trace --plot`) plus an exit code.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "radiso/descent.hpp"
#include "radiso/model.hpp"
#include "radiso/polytope.hpp"

namespace radiso::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int { ok = 0, failure = 1, infeasible = 2, not_converged = 3 };

struct Options {
  std::string in;
  /// "uniform" or a comma separated list; overrides the file's weights.
  std::optional<std::string> c;
  double eps = 1e-6;
  std::string method = "smooth";
  /// "auto" or a number.
  std::optional<std::string> alpha;
  int max_iters = 200'000;
  std::optional<double> region_bound;
  std::optional<double> svd_tol;
  std::optional<std::string> out;
  std::uint64_t seed = 1;
  bool timing = false;
  /// verify: file holding a transform or a solve report.
  std::string transform;
  /// trace: emit CSV instead of JSON.
  bool plot = false;
};

struct Outcome {
  int exit_code = ExitCode::ok;
  /// Report text, newline terminated.
  std::string body;
};

/// Reads `opts.in`; the format follows the extension (.csv, otherwise JSON).
/// Weights may be on the boundary so that `check` can classify them.
Instance load_instance(const Options& opts);

Outcome cmd_solve(const Options& opts);
Outcome cmd_check(const Options& opts);
Outcome cmd_bounds(const Options& opts);
Outcome cmd_verify(const Options& opts);
Outcome cmd_trace(const Options& opts);

/// Parses argv, dispatches, writes the body to --out or `out`. Errors go to
/// `err` with exit code 1.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

namespace report {

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string checksum(const Instance& instance);
nlohmann::json digest(const Instance& instance);
/// Witness and class indices are 1-based.
nlohmann::json verdicts(const PolytopeReport& report, std::string_view test);
nlohmann::json bounds(const BoundReport& b);
nlohmann::json transform(const Transformation& t);
/// Inverse of transform(); also accepts a full solve report.
Matrix parse_transform(const nlohmann::json& doc);
nlohmann::json result(const IsotropyResult& r);
nlohmann::json provenance(const Options& opts);
std::string render(const nlohmann::json& doc);

}  // namespace report

}  // namespace radiso::cli
