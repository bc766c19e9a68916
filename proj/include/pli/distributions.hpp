#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pli/rng.hpp"

namespace pli {

struct Uniform {
  double a;
  double b;
};

struct Normal {
  double mu;
  double sigma;
};

//! Parametric marginal input law. Only the uniform and normal families are
//! built in; new families extend the variant.
class Marginal {
 public:
  using Family = std::variant<Uniform, Normal>;

  /// Throws Error(invalid_argument) unless a < b (both finite).
  static Marginal uniform(double a, double b);
  /// Throws Error(invalid_argument) unless sigma > 0.
  static Marginal normal(double mu, double sigma);

  const Family& family() const noexcept { return family_; }
  bool is_uniform() const noexcept { return std::holds_alternative<Uniform>(family_); }
  bool is_normal() const noexcept { return std::holds_alternative<Normal>(family_); }

  double pdf(double x) const;
  double cdf(double x) const;
  /// Throws Error(invalid_argument) for p outside (0, 1).
  double quantile(double p) const;

  double mean() const;
  double sd() const;
  double variance() const { return sd() * sd(); }

  /// Support bounds; infinite for the normal family.
  double lower() const;
  double upper() const;
  bool bounded() const noexcept { return is_uniform(); }
  bool in_support(double x) const { return x >= lower() && x <= upper(); }

  /// Inverse-CDF draws from a counter-based stream; deterministic in seed.
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;
  std::vector<double> sample(std::size_t n, const CounterStream& stream) const;

  /// Short human-readable form, e.g. "uniform(0, 1)".
  std::string describe() const;

 private:
  explicit Marginal(Family f) : family_(f) {}

  Family family_;
};

/// Standard normal helpers shared by estimators and oracles.
double normal_pdf(double z);
double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace pli
