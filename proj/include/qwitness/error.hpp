#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qwitness {

enum class ErrorKind {
  invalid_argument,
  insufficient_data,
  incomplete_input,
  insufficient_angular_coverage,
  ill_conditioned,
  degenerate_statistic,
  oracle_precision,
  parse_error,
  io_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base class for every error raised by the library. The kind is stable and
/// is what the CLI maps onto its exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct SolveDiagnostics {
  double condition_number = 0.0;
  double residual = 0.0;
  int refinement_steps = 0;
  bool rescaled = false;
  bool equilibrated = false;
};

class IllConditionedError : public Error {
 public:
  IllConditionedError(const std::string& what, SolveDiagnostics diag)
      : Error(ErrorKind::ill_conditioned, what), diagnostics_(diag) {}

  const SolveDiagnostics& diagnostics() const noexcept { return diagnostics_; }

 private:
  SolveDiagnostics diagnostics_;
};

class AngularCoverageError : public Error {
 public:
  AngularCoverageError(const std::string& what, std::vector<int> bins)
      : Error(ErrorKind::insufficient_angular_coverage, what),
        deficient_bins_(std::move(bins)) {}

  /// Indices m (1..2N) of target angles m*pi/(2N) that had too few samples.
  const std::vector<int>& deficient_bins() const noexcept { return deficient_bins_; }

 private:
  std::vector<int> deficient_bins_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(ErrorKind::parse_error, what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(ErrorKind::invalid_argument, what);
}

}  // namespace qwitness
