#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pli/perturbation.hpp"
#include "pli/sample.hpp"

namespace pli {

//! Likelihood-ratio weights L^(n) of one input under one tilting.
class WeightVector {
 public:
  /// Throws Error(invalid_argument) on negative or non-finite entries.
  explicit WeightVector(std::vector<double> weights);
  static WeightVector ones(std::size_t n) { return WeightVector(std::vector<double>(n, 1.0)); }

  std::span<const double> values() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t n) const { return weights_[n]; }
  double sum() const;

 private:
  std::vector<double> weights_;
};

class QuantileSpec {
 public:
  /// Throws Error(invalid_argument) unless 0 < alpha < 1.
  explicit QuantileSpec(double alpha);
  double alpha() const noexcept { return alpha_; }

 private:
  double alpha_;
};

enum class Direction { exceed, fall_below };

struct ThresholdSpec {
  double eta;
  Direction direction = Direction::exceed;

  bool hit(double y) const { return direction == Direction::exceed ? y > eta : y < eta; }
};

enum class QuantileEstimator { normalized, unnormalized, kde_smoothed };

/// weights[n] = likelihood_ratio(t, inputs[n][input_index]) (0-based index).
/// Out-of-support values raise Error(out_of_support) naming the row.
WeightVector weights_for(const Sample& s, std::size_t input_index, const TiltedDensity& t);

double est_prob_mc(const Sample& s, const ThresholdSpec& th);
/// Unnormalized reverse-IS estimate; may exceed 1 through sampling noise.
double est_prob_is(const Sample& s, const ThresholdSpec& th, const WeightVector& w);

//! Outputs sorted once, reusable for every weighted-quantile query on the
//! same sample. Queries implement inf{t : F(t) >= alpha} exactly, with tied
//! outputs accumulating all their weight before the comparison.
class OrderedOutputs {
 public:
  explicit OrderedOutputs(std::span<const double> outputs);

  std::size_t size() const noexcept { return sorted_.size(); }
  std::span<const double> sorted() const noexcept { return sorted_; }
  /// order()[k] is the original row of the k-th smallest output.
  std::span<const std::size_t> order() const noexcept { return order_; }

  /// ceil(N alpha)-th order statistic.
  double empirical(double alpha) const;
  /// Cumulative weight scaled by 1/N; Error(mass_deficit) when (1/N) sum L < alpha.
  double unnormalized(double alpha, std::span<const double> weights) const;
  /// Cumulative weight over total weight; Error(zero_mass) when sum L == 0.
  double normalized(double alpha, std::span<const double> weights) const;
  /// Root of the Gaussian-kernel smoothed self-normalized CDF at alpha.
  double kde_smoothed(double alpha, std::span<const double> weights, double bandwidth) const;

 private:
  double scan(double alpha, std::span<const double> weights, double divisor) const;

  std::vector<double> sorted_;
  std::vector<std::size_t> order_;
};

double quantile_empirical(const Sample& s, QuantileSpec q);
double quantile_is_unnorm(const Sample& s, QuantileSpec q, const WeightVector& w);
double quantile_is_norm(const Sample& s, QuantileSpec q, const WeightVector& w);
/// Bandwidth defaults to silverman_bandwidth(s.outputs()).
double quantile_kde_smoothed(const Sample& s, QuantileSpec q, const WeightVector& w,
                             std::optional<double> bandwidth = std::nullopt);

/// Dispatch on the estimator kind.
double quantile_is(const Sample& s, QuantileSpec q, const WeightVector& w, QuantileEstimator e);

/// Asymptotic standard deviation of an IS quantile estimate,
/// sqrt(V / N) / f_at_q. For the self-normalized estimator (normalized and
/// kde_smoothed) V is the sample variance of L * (1{y <= q} - alpha); for the
/// unnormalized estimator V is the sample variance of L * 1{y <= q}. With unit
/// weights both reduce to alpha (1 - alpha). Throws Error(invalid_argument)
/// when f_at_q <= 0.
double asymptotic_sd_is_quantile(const Sample& s, QuantileSpec q, const WeightVector& w,
                                 double f_at_q,
                                 QuantileEstimator e = QuantileEstimator::normalized);

/// 0.9 * min(sd, IQR / 1.34) * N^(-1/5); falls back to sd when IQR is zero.
/// Throws Error(degenerate_sample) for N < 2 or zero spread.
double silverman_bandwidth(std::span<const double> outputs);

/// Gaussian-kernel density estimate at t with Silverman bandwidth.
double kde_density_at(std::span<const double> outputs, double t);
/// Weighted (self-normalized) variant; the bandwidth still comes from the
/// unweighted outputs unless given.
double kde_density_at(std::span<const double> outputs, std::span<const double> weights, double t,
                      std::optional<double> bandwidth = std::nullopt);

/// (sum L)^2 / sum L^2. Throws Error(zero_mass) when sum L == 0.
double effective_sample_size(const WeightVector& w);

}  // namespace pli
