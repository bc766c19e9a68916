#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pli/distributions.hpp"
#include "pli/sample.hpp"
#include "pli/study.hpp"

namespace pli::models {

//! y = sum_i a_i x_i with independent normal inputs. The output law is
//! normal(sum a_i mu_i, sum a_i^2 sigma_i^2), and stays normal under any
//! mean or sd perturbation of one input, which makes closed-form oracles
//! available.
class LinearGaussianModel {
 public:
  /// Throws Error(invalid_argument) on size mismatch or non-normal marginals.
  LinearGaussianModel(std::vector<double> coefficients, std::vector<Marginal> marginals);

  std::size_t dim() const noexcept { return coefficients_.size(); }
  std::span<const double> coefficients() const noexcept { return coefficients_; }
  std::span<const Marginal> marginals() const noexcept { return marginals_; }

  double evaluate(std::span<const double> x) const;
  double output_mean() const;
  double output_sd() const;

 private:
  std::vector<double> coefficients_;
  std::vector<Marginal> marginals_;
};

struct Perturbation {
  std::size_t input;
  double delta_in_sd_units;
  PerturbationKind kind = PerturbationKind::mean;
};

/// Output law parameters (mean, sd) after an optional perturbation.
std::pair<double, double> oracle_output_law(const LinearGaussianModel& m,
                                            std::optional<Perturbation> p = std::nullopt);
double oracle_quantile(const LinearGaussianModel& m, double alpha,
                       std::optional<Perturbation> p = std::nullopt);
/// P(y > eta) under the optionally perturbed law.
double oracle_exceedance(const LinearGaussianModel& m, double eta,
                         std::optional<Perturbation> p = std::nullopt);

//! Nine independent uniform inputs with a fixed polynomial response that is
//! monotone in every coordinate over the input box: increasing in inputs 1,
//! 4, 7, 8 and decreasing in 2, 3, 5, 6, 9. Outputs are positive (a peak
//! temperature in kelvin, roughly 500 to 600).
class SyntheticStudyModel {
 public:
  static constexpr std::size_t kDim = 9;

  SyntheticStudyModel();

  std::size_t dim() const noexcept { return kDim; }
  std::span<const Marginal> marginals() const noexcept { return marginals_; }
  std::vector<std::string> names() const;
  /// +1 where the response increases with the input, -1 where it decreases.
  static constexpr std::array<int, kDim> kDirection{+1, -1, -1, +1, -1, -1, +1, +1, -1};

  double evaluate(std::span<const double> x) const;

 private:
  std::vector<Marginal> marginals_;
};

using Response = std::function<double(std::span<const double>)>;

/// Draws n rows from the nominal marginals (one counter stream per input
/// dimension) and evaluates the response on each.
Sample generate_sample(std::span<const Marginal> marginals, const Response& response,
                       std::size_t n, std::uint64_t seed);
Sample generate_sample(const LinearGaussianModel& m, std::size_t n, std::uint64_t seed);
Sample generate_sample(const SyntheticStudyModel& m, std::size_t n, std::uint64_t seed);

}  // namespace pli::models
