#include "qwitness/error.hpp"

namespace qwitness {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::incomplete_input: return "incomplete-input";
    case ErrorKind::insufficient_angular_coverage: return "insufficient-angular-coverage";
    case ErrorKind::ill_conditioned: return "ill-conditioned";
    case ErrorKind::degenerate_statistic: return "degenerate-statistic";
    case ErrorKind::oracle_precision: return "oracle-precision";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace qwitness
