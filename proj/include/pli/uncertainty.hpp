#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <variant>

#include "pli/sample.hpp"

namespace pli {

struct BootstrapMethod {
  std::size_t resamples = 200;
  std::uint64_t seed = 0;
};

/// Leave-one-out jackknife. Known to be inconsistent for quantiles; results
/// carry a caveat flag in that case.
struct LooMethod {};

struct CiConfig {
  std::variant<BootstrapMethod, LooMethod> method = BootstrapMethod{};
  double level = 0.95;

  /// Throws Error(invalid_argument): resamples < 100 or level outside (0, 1).
  void validate() const;
};

struct Interval {
  double low;
  double high;
  /// Resamples dropped because the recipe threw.
  std::size_t dropped = 0;
  std::size_t replicates = 0;
  /// Set on jackknife intervals, which are inconsistent for quantile
  /// statistics and should be read as a rough diagnostic there.
  bool jackknife = false;
};

/// Statistic recomputed on every resampled or leave-one-out sample.
using Recipe = std::function<double(const Sample&)>;

/// Percentile bootstrap over joint row resamples. Recipe failures (pli::Error)
/// drop the resample; more than 10% dropped raises
/// Error(too_many_failed_resamples).
Interval ci_bootstrap(const Sample& s, const Recipe& recipe, const BootstrapMethod& method,
                      double level);

/// Jackknife interval point +- z * sqrt(var_jack). Requires N >= 3.
Interval ci_loo(const Sample& s, const Recipe& recipe, double level);

Interval confidence_interval(const Sample& s, const Recipe& recipe, const CiConfig& cfg);

/// Jackknife variance ((N-1)/N) sum (theta_i - mean)^2 of the LOO replicates.
double jackknife_variance(const Sample& s, const Recipe& recipe);

}  // namespace pli
