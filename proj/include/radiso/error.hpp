#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace radiso {

enum class ErrorKind {
  parse,
  dimension,
  rank,
  sign,
  weight_sum,
  zero_vector,
  range,
  singular,
  cap,
  precondition,
  infeasible,
  reducible,
  missing_alpha,
  divergence,
  non_convergence,
  degenerate,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure reported by the library. The kind is
/// stable and is what the CLI maps onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace radiso
