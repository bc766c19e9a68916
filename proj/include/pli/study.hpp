#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pli/distributions.hpp"
#include "pli/error.hpp"
#include "pli/estimators.hpp"
#include "pli/perturbation.hpp"
#include "pli/sample.hpp"
#include "pli/uncertainty.hpp"

namespace pli {

enum class PerturbationKind { mean, sd };

using Quantity = std::variant<ThresholdSpec, QuantileSpec>;

struct NamedMarginal {
  std::string name;
  Marginal marginal;
};

struct StudyConfig {
  std::vector<NamedMarginal> inputs;
  Quantity quantity = QuantileSpec(0.95);
  PerturbationKind perturbation = PerturbationKind::mean;
  /// Perturbation sizes in sd units of each unperturbed marginal.
  std::vector<double> deltas;
  QuantileEstimator estimator = QuantileEstimator::normalized;
  CiConfig ci;
  std::uint64_t seed = 0;
  /// Worker threads for the sweep; 0 picks the hardware concurrency.
  std::size_t threads = 0;

  /// Throws Error(invalid_argument) for an empty input list, fewer than two
  /// grid values, grid values not strictly increasing or a bad CI config.
  void validate() const;
};

/// count values evenly spaced over [lo, hi]. When 0 lies inside the range but
/// off the grid, the grid value nearest to 0 is replaced by exactly 0.
std::vector<double> regular_grid(double lo, double hi, std::size_t count);

struct PointDiagnostics {
  double ess = std::numeric_limits<double>::quiet_NaN();
  /// +infinity when the likelihood ratio is unbounded.
  double sup_ratio = std::numeric_limits<double>::quiet_NaN();
  bool near_boundary = false;
};

struct PliPoint {
  double delta = 0.0;
  double index_value = std::numeric_limits<double>::quiet_NaN();
  double nominal = std::numeric_limits<double>::quiet_NaN();
  double perturbed = std::numeric_limits<double>::quiet_NaN();
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  PointDiagnostics diagnostics;
  /// Empty on success. When only the interval failed the index fields are
  /// still filled in.
  std::optional<ErrorCode> status;
  std::string message;

  bool ok() const noexcept { return !status.has_value(); }
  bool has_index() const noexcept { return !std::isnan(index_value); }
};

struct PliCurve {
  std::size_t input_index = 0;
  std::string input_name;
  Quantity quantity = QuantileSpec(0.95);
  PerturbationKind perturbation = PerturbationKind::mean;
  std::vector<PliPoint> points;
};

TiltedDensity perturb(const Marginal& base, PerturbationKind kind, double delta_in_sd_units);

/// One PliPoint per grid value for input i, all computed from the single
/// ingested sample. Failures are recorded in the point, never thrown.
PliCurve sweep(const Sample& s, const StudyConfig& cfg, std::size_t input_index);

/// Sweeps every input. Points are evaluated concurrently and assembled in
/// grid order; output is independent of the thread count.
std::vector<PliCurve> run_study(const Sample& s, const StudyConfig& cfg);

}  // namespace pli
