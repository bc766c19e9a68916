#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "pli/distributions.hpp"
#include "pli/rng.hpp"

namespace pli {

/// Moment functions available as linear constraints.
enum class Moment { raw_x, raw_x_squared };

struct Constraint {
  Moment psi;
  double target;
};

/// One or two moment constraints with distinct tags.
using ConstraintSet = std::vector<Constraint>;

struct TiltDiagnostics {
  /// Target lies within 1% of the edge of the achievable range.
  bool near_boundary = false;
  int iterations = 0;
  /// Largest standardized moment residual at exit.
  double residual = 0.0;
};

//! KL-minimal perturbation of a base marginal under moment constraints:
//!
//!   pdf(x) = base.pdf(x) * exp(sum_k lambda_k psi_k(x) - log_normalizer)
//!
//! Internally the exponent is held in standardized coordinates
//! z = (x - base.mean()) / base.sd(), which keeps evaluation well conditioned
//! for supports far from the origin. Values are immutable once solved.
class TiltedDensity {
 public:
  /// Identity tilting (every lambda zero) for the given constraint tags.
  static TiltedDensity identity(const Marginal& base, const ConstraintSet& cs);

  const Marginal& base() const noexcept { return base_; }
  const ConstraintSet& constraints() const noexcept { return constraints_; }
  /// Multipliers in raw-x units, one per constraint, in constraint order.
  const std::vector<double>& lambdas() const noexcept { return lambdas_; }
  double log_normalizer() const noexcept { return log_normalizer_; }
  const TiltDiagnostics& diagnostics() const noexcept { return diagnostics_; }
  bool is_identity() const noexcept { return theta_[0] == 0.0 && theta_[1] == 0.0; }

  /// log(f_delta(x) / f(x)); no support check.
  double log_ratio(double x) const;
  double pdf(double x) const;
  double cdf(double x) const;

  /// Moments of the tilted law as realized by the solver.
  double mean() const;
  double sd() const;

  /// Exponent in standardized coordinates: theta[0] z + theta[1] z^2 - log_norm_z.
  const std::array<double, 2>& standardized_theta() const noexcept { return theta_; }
  double standardized_log_normalizer() const noexcept { return log_norm_z_; }

 private:
  friend TiltedDensity solve_tilting(const Marginal& base, const ConstraintSet& cs);
  friend double kl_divergence(const TiltedDensity& t);

  TiltedDensity(const Marginal& base, ConstraintSet cs);

  double to_z(double x) const { return (x - center_) / scale_; }

  Marginal base_;
  ConstraintSet constraints_;
  std::vector<double> lambdas_;
  double log_normalizer_ = 0.0;
  double center_;
  double scale_;
  std::array<double, 2> theta_{0.0, 0.0};
  double log_norm_z_ = 0.0;
  double mean_z_ = 0.0;
  double var_z_ = 1.0;
  TiltDiagnostics diagnostics_;
};

/// Solves the constrained-KL program by Newton iteration on the convex dual.
/// Throws Error(target_unachievable), Error(solver_diverged) or
/// Error(invalid_argument) for malformed constraint sets.
TiltedDensity solve_tilting(const Marginal& base, const ConstraintSet& cs);

/// Mean moved to base.mean() + delta * base.sd().
TiltedDensity perturb_mean(const Marginal& base, double delta_in_sd_units);

/// Mean held, sd moved to base.sd() * (1 + delta).
TiltedDensity perturb_sd(const Marginal& base, double delta_in_sd_units);

/// f_delta(x) / f(x). Throws Error(out_of_support) outside the base support.
double likelihood_ratio(const TiltedDensity& t, double x);

/// KL(f_delta, f) >= 0; zero for the identity tilting.
double kl_divergence(const TiltedDensity& t);

/// Supremum of the likelihood ratio over the base support; +infinity when the
/// ratio is unbounded.
double sup_likelihood_ratio(const TiltedDensity& t);

//! Inverse-CDF sampler for a solved tilted density. Compact supports use a
//! cumulative quadrature table refined by safeguarded Newton steps within a
//! cell; Gaussian bases are sampled in closed form.
class TiltedSampler {
 public:
  explicit TiltedSampler(const TiltedDensity& t, std::size_t cells = 1024);

  double quantile(double p) const;
  std::vector<double> sample(std::size_t n, const CounterStream& stream) const;
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const {
    return sample(n, CounterStream(seed));
  }

 private:
  double density_z(double z) const;

  TiltedDensity density_;
  std::vector<double> edges_;
  std::vector<double> cumulative_;
};

}  // namespace pli
