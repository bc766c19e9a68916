#pragma once

#include <cstddef>

#include "pli/estimators.hpp"
#include "pli/perturbation.hpp"
#include "pli/sample.hpp"

namespace pli {

/// Perturbed-law index of a positive quantity of interest:
///   perturbed/nominal - 1   if perturbed > nominal,
///   1 - nominal/perturbed   if perturbed < nominal,
///   0                       if equal.
/// Throws Error(non_positive_quantity) unless both arguments are > 0.
double pli_index(double nominal, double perturbed);

struct PliEstimate {
  double nominal;
  double perturbed;
  double index;
};

/// Nominal and perturbed quantiles from one sample. The nominal value uses the
/// same estimator at unit weights, which for the normalized and unnormalized
/// estimators is exactly the empirical quantile.
PliEstimate pli_for_quantile(const Sample& s, QuantileSpec q, std::size_t input_index,
                             const TiltedDensity& t,
                             QuantileEstimator e = QuantileEstimator::normalized);

PliEstimate pli_for_probability(const Sample& s, const ThresholdSpec& th, std::size_t input_index,
                                const TiltedDensity& t);

}  // namespace pli
