#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pli {

/// Failure categories. The names returned by to_string() are the status
/// strings written to result files.
enum class ErrorCode {
  invalid_argument,
  target_unachievable,
  solver_diverged,
  mass_deficit,
  zero_mass,
  degenerate_sample,
  non_positive_quantity,
  too_many_failed_resamples,
  degenerate_jackknife,
  parse_error,
  dimension_mismatch,
  out_of_support,
  io_error,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pli
