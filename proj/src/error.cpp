#include "pli/error.hpp"

namespace pli {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::target_unachievable: return "TargetUnachievable";
    case ErrorCode::solver_diverged: return "SolverDiverged";
    case ErrorCode::mass_deficit: return "MassDeficit";
    case ErrorCode::zero_mass: return "ZeroMass";
    case ErrorCode::degenerate_sample: return "DegenerateSample";
    case ErrorCode::non_positive_quantity: return "NonPositiveQuantity";
    case ErrorCode::too_many_failed_resamples: return "TooManyFailedResamples";
    case ErrorCode::degenerate_jackknife: return "DegenerateJackknife";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::out_of_support: return "OutOfSupport";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

}  // namespace pli
