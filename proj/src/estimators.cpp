#include "pli/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pli/error.hpp"

namespace pli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Kernel tails beyond this many bandwidths are treated as exactly 0 or 1.
constexpr double kKernelReach = 9.0;

void require_same_size(const Sample& s, const WeightVector& w) {
  if (w.size() != s.size()) {
    throw Error(ErrorCode::dimension_mismatch, "weight vector length differs from sample size");
  }
}

// Type-7 (linear interpolation) quantile of sorted data.
double interpolated_quantile(std::span<const double> sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
  for (std::size_t n = 0; n < weights_.size(); ++n) {
    if (!(std::isfinite(weights_[n]) && weights_[n] >= 0.0)) {
      throw Error(ErrorCode::invalid_argument,
                  "weight " + std::to_string(n + 1) + " is negative or not finite");
    }
  }
}

double WeightVector::sum() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

QuantileSpec::QuantileSpec(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "quantile level alpha must lie in (0, 1)");
  }
}

WeightVector weights_for(const Sample& s, std::size_t input_index, const TiltedDensity& t) {
  if (input_index >= s.dim()) {
    throw Error(ErrorCode::invalid_argument, "input index out of range");
  }
  std::vector<double> w(s.size());
  for (std::size_t n = 0; n < s.size(); ++n) {
    try {
      w[n] = likelihood_ratio(t, s.input(n, input_index));
    } catch (const Error& e) {
      throw Error(e.code(), "row " + std::to_string(n + 1) + ": " + e.what());
    }
  }
  return WeightVector(std::move(w));
}

double est_prob_mc(const Sample& s, const ThresholdSpec& th) {
  double hits = 0.0;
  for (double y : s.outputs()) hits += th.hit(y) ? 1.0 : 0.0;
  return hits / static_cast<double>(s.size());
}

double est_prob_is(const Sample& s, const ThresholdSpec& th, const WeightVector& w) {
  require_same_size(s, w);
  const auto y = s.outputs();
  double acc = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) {
    if (th.hit(y[n])) acc += w[n];
  }
  return acc / static_cast<double>(s.size());
}

OrderedOutputs::OrderedOutputs(std::span<const double> outputs)
    : sorted_(outputs.size()), order_(outputs.size()) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&outputs](std::size_t i, std::size_t j) { return outputs[i] < outputs[j]; });
  for (std::size_t k = 0; k < order_.size(); ++k) sorted_[k] = outputs[order_[k]];
}

double OrderedOutputs::scan(double alpha, std::span<const double> weights, double divisor) const {
  const bool unit = weights.empty();
  const std::size_t n = sorted_.size();
  double cum = 0.0;
  for (std::size_t k = 0; k < n;) {
    std::size_t j = k;
    while (j < n && sorted_[j] == sorted_[k]) {
      cum += unit ? 1.0 : weights[order_[j]];
      ++j;
    }
    if (cum / divisor >= alpha) return sorted_[k];
    k = j;
  }
  return kNaN;
}

double OrderedOutputs::empirical(double alpha) const {
  return scan(alpha, {}, static_cast<double>(sorted_.size()));
}

double OrderedOutputs::unnormalized(double alpha, std::span<const double> weights) const {
  const double q = scan(alpha, weights, static_cast<double>(sorted_.size()));
  if (std::isnan(q)) {
    throw Error(ErrorCode::mass_deficit,
                "total weighted mass (1/N) sum L is below alpha; unnormalized quantile undefined");
  }
  return q;
}

double OrderedOutputs::normalized(double alpha, std::span<const double> weights) const {
  // Summed in sorted order so the final cumulative value equals the total.
  double total = 0.0;
  for (std::size_t idx : order_) total += weights[idx];
  if (!(total > 0.0)) throw Error(ErrorCode::zero_mass, "all weights are zero");
  return scan(alpha, weights, total);
}

double OrderedOutputs::kde_smoothed(double alpha, std::span<const double> weights,
                                    double bandwidth) const {
  if (!(bandwidth > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "kernel bandwidth must be positive");
  }
  const std::size_t n = sorted_.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] + weights[order_[k]];
  const double total = prefix[n];
  if (!(total > 0.0)) throw Error(ErrorCode::zero_mass, "all weights are zero");

  const double h = bandwidth;
  auto window = [&](double t) {
    const auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), t - kKernelReach * h);
    const auto hi = std::upper_bound(lo, sorted_.end(), t + kKernelReach * h);
    return std::pair<std::size_t, std::size_t>(lo - sorted_.begin(), hi - sorted_.begin());
  };
  // Smoothed CDF and its derivative at t.
  auto evaluate = [&](double t) {
    const auto [lo, hi] = window(t);
    double cdf = prefix[lo];
    double dens = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      const double u = (t - sorted_[k]) / h;
      const double w = weights[order_[k]];
      cdf += w * normal_cdf(u);
      dens += w * normal_pdf(u);
    }
    return std::pair<double, double>(cdf / total - alpha, dens / (h * total));
  };

  double lo_t = sorted_.front() - 2.0 * kKernelReach * h;
  double hi_t = sorted_.back() + 2.0 * kKernelReach * h;
  double t = normalized(alpha, weights);
  for (int iter = 0; iter < 200; ++iter) {
    const auto [f, df] = evaluate(t);
    if (f == 0.0) return t;
    if (f < 0.0) lo_t = t; else hi_t = t;
    double next = df > 0.0 ? t - f / df : 0.5 * (lo_t + hi_t);
    if (!(next > lo_t && next < hi_t)) next = 0.5 * (lo_t + hi_t);
    if (std::abs(next - t) <= 1e-14 * (std::abs(t) + h)) return next;
    t = next;
  }
  return t;
}

double quantile_empirical(const Sample& s, QuantileSpec q) {
  return OrderedOutputs(s.outputs()).empirical(q.alpha());
}

double quantile_is_unnorm(const Sample& s, QuantileSpec q, const WeightVector& w) {
  require_same_size(s, w);
  return OrderedOutputs(s.outputs()).unnormalized(q.alpha(), w.values());
}

double quantile_is_norm(const Sample& s, QuantileSpec q, const WeightVector& w) {
  require_same_size(s, w);
  return OrderedOutputs(s.outputs()).normalized(q.alpha(), w.values());
}

double quantile_kde_smoothed(const Sample& s, QuantileSpec q, const WeightVector& w,
                             std::optional<double> bandwidth) {
  require_same_size(s, w);
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(s.outputs());
  return OrderedOutputs(s.outputs()).kde_smoothed(q.alpha(), w.values(), h);
}

double quantile_is(const Sample& s, QuantileSpec q, const WeightVector& w, QuantileEstimator e) {
  switch (e) {
    case QuantileEstimator::normalized: return quantile_is_norm(s, q, w);
    case QuantileEstimator::unnormalized: return quantile_is_unnorm(s, q, w);
    case QuantileEstimator::kde_smoothed: return quantile_kde_smoothed(s, q, w);
  }
  return kNaN;
}

double asymptotic_sd_is_quantile(const Sample& s, QuantileSpec q, const WeightVector& w,
                                 double f_at_q, QuantileEstimator e) {
  if (!(f_at_q > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "density at the quantile must be positive");
  }
  require_same_size(s, w);
  const double quant = quantile_is(s, q, w, e);
  const double centre = e == QuantileEstimator::unnormalized ? 0.0 : q.alpha();
  const auto y = s.outputs();
  const auto n = static_cast<double>(s.size());
  std::vector<double> v(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    v[k] = w[k] * ((y[k] <= quant ? 1.0 : 0.0) - centre);
  }
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / n) / (f_at_q * std::sqrt(n));
}

double silverman_bandwidth(std::span<const double> outputs) {
  const std::size_t n = outputs.size();
  if (n < 2) throw Error(ErrorCode::degenerate_sample, "kernel estimate needs at least 2 outputs");
  const double nd = static_cast<double>(n);
  const double mean = std::accumulate(outputs.begin(), outputs.end(), 0.0) / nd;
  double ss = 0.0;
  for (double y : outputs) ss += (y - mean) * (y - mean);
  const double sd = std::sqrt(ss / (nd - 1.0));
  if (!(sd > 0.0)) throw Error(ErrorCode::degenerate_sample, "all outputs are equal");

  std::vector<double> sorted(outputs.begin(), outputs.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = interpolated_quantile(sorted, 0.75) - interpolated_quantile(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(nd, -0.2);
}

double kde_density_at(std::span<const double> outputs, double t) {
  const double h = silverman_bandwidth(outputs);
  double acc = 0.0;
  for (double y : outputs) acc += normal_pdf((t - y) / h);
  return acc / (static_cast<double>(outputs.size()) * h);
}

double kde_density_at(std::span<const double> outputs, std::span<const double> weights, double t,
                      std::optional<double> bandwidth) {
  if (weights.size() != outputs.size()) {
    throw Error(ErrorCode::dimension_mismatch, "weight vector length differs from output count");
  }
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(outputs);
  double acc = 0.0;
  double total = 0.0;
  for (std::size_t n = 0; n < outputs.size(); ++n) {
    acc += weights[n] * normal_pdf((t - outputs[n]) / h);
    total += weights[n];
  }
  if (!(total > 0.0)) throw Error(ErrorCode::zero_mass, "all weights are zero");
  return acc / (total * h);
}

double effective_sample_size(const WeightVector& w) {
  double s = 0.0;
  double s2 = 0.0;
  for (double x : w.values()) {
    s += x;
    s2 += x * x;
  }
  if (!(s > 0.0)) throw Error(ErrorCode::zero_mass, "all weights are zero");
  return s * s / s2;
}

}  // namespace pli
