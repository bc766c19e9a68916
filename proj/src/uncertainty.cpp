#include "pli/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pli/distributions.hpp"
#include "pli/error.hpp"
#include "pli/rng.hpp"

namespace pli {
namespace {

// ceil(B p)-th order statistic of sorted replicates.
double order_statistic(const std::vector<double>& sorted, double p) {
  const auto b = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(b * p - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

std::vector<double> loo_replicates(const Sample& s, const Recipe& recipe) {
  if (s.size() < 3) throw Error(ErrorCode::invalid_argument, "leave-one-out needs N >= 3");
  std::vector<double> reps(s.size());
  for (std::size_t n = 0; n < s.size(); ++n) reps[n] = recipe(s.without_row(n));
  return reps;
}

double spread(const std::vector<double>& reps) {
  const auto n = static_cast<double>(reps.size());
  const double mean = std::accumulate(reps.begin(), reps.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : reps) ss += (r - mean) * (r - mean);
  return (n - 1.0) / n * ss;
}

}  // namespace

void CiConfig::validate() const {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "confidence level must lie in (0, 1)");
  }
  if (const auto* b = std::get_if<BootstrapMethod>(&method); b && b->resamples < 100) {
    throw Error(ErrorCode::invalid_argument, "bootstrap needs at least 100 resamples");
  }
}

Interval ci_bootstrap(const Sample& s, const Recipe& recipe, const BootstrapMethod& method,
                      double level) {
  const CounterStream root(method.seed);
  const std::size_t n = s.size();
  std::vector<std::size_t> rows(n);
  std::vector<double> reps;
  reps.reserve(method.resamples);
  std::size_t dropped = 0;
  for (std::size_t b = 0; b < method.resamples; ++b) {
    const CounterStream stream = root.split(b);
    for (std::size_t k = 0; k < n; ++k) rows[k] = stream.below(k, n);
    try {
      reps.push_back(recipe(s.subset(rows)));
    } catch (const Error&) {
      ++dropped;
    }
  }
  if (reps.empty() || 10 * dropped > method.resamples) {
    throw Error(ErrorCode::too_many_failed_resamples,
                std::to_string(dropped) + " of " + std::to_string(method.resamples) +
                    " bootstrap resamples failed");
  }
  std::sort(reps.begin(), reps.end());
  const double tail = 0.5 * (1.0 - level);
  return Interval{order_statistic(reps, tail), order_statistic(reps, 1.0 - tail), dropped,
                  reps.size()};
}

double jackknife_variance(const Sample& s, const Recipe& recipe) {
  return spread(loo_replicates(s, recipe));
}

Interval ci_loo(const Sample& s, const Recipe& recipe, double level) {
  const std::vector<double> reps = loo_replicates(s, recipe);
  const double point = recipe(s);
  const bool all_equal =
      std::all_of(reps.begin(), reps.end(), [&reps](double r) { return r == reps.front(); });
  if (all_equal && point != reps.front()) {
    throw Error(ErrorCode::degenerate_jackknife,
                "all leave-one-out replicates agree but differ from the full-sample estimate");
  }
  const double half = normal_quantile(1.0 - 0.5 * (1.0 - level)) * std::sqrt(spread(reps));
  return Interval{point - half, point + half, 0, reps.size(), true};
}

Interval confidence_interval(const Sample& s, const Recipe& recipe, const CiConfig& cfg) {
  if (const auto* b = std::get_if<BootstrapMethod>(&cfg.method)) {
    return ci_bootstrap(s, recipe, *b, cfg.level);
  }
  return ci_loo(s, recipe, cfg.level);
}

}  // namespace pli
