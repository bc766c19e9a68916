#include "pli/indices.hpp"

#include <cmath>
#include <sstream>

#include "pli/error.hpp"

namespace pli {

double pli_index(double nominal, double perturbed) {
  if (!(nominal > 0.0 && perturbed > 0.0) || !std::isfinite(nominal) || !std::isfinite(perturbed)) {
    std::ostringstream os;
    os.precision(17);
    os << "index needs positive finite quantities, got nominal " << nominal << " and perturbed "
       << perturbed << "; shift the output to a positive scale";
    throw Error(ErrorCode::non_positive_quantity, os.str());
  }
  if (perturbed > nominal) return perturbed / nominal - 1.0;
  if (perturbed < nominal) return 1.0 - nominal / perturbed;
  return 0.0;
}

PliEstimate pli_for_quantile(const Sample& s, QuantileSpec q, std::size_t input_index,
                             const TiltedDensity& t, QuantileEstimator e) {
  const WeightVector w = weights_for(s, input_index, t);
  const OrderedOutputs ordered(s.outputs());
  const double alpha = q.alpha();

  PliEstimate out{};
  switch (e) {
    case QuantileEstimator::normalized:
      out.nominal = ordered.empirical(alpha);
      out.perturbed = ordered.normalized(alpha, w.values());
      break;
    case QuantileEstimator::unnormalized:
      out.nominal = ordered.empirical(alpha);
      out.perturbed = ordered.unnormalized(alpha, w.values());
      break;
    case QuantileEstimator::kde_smoothed: {
      const double h = silverman_bandwidth(s.outputs());
      const std::vector<double> ones(s.size(), 1.0);
      out.nominal = ordered.kde_smoothed(alpha, ones, h);
      out.perturbed = ordered.kde_smoothed(alpha, w.values(), h);
      break;
    }
  }
  out.index = pli_index(out.nominal, out.perturbed);
  return out;
}

PliEstimate pli_for_probability(const Sample& s, const ThresholdSpec& th, std::size_t input_index,
                                const TiltedDensity& t) {
  const WeightVector w = weights_for(s, input_index, t);
  PliEstimate out{};
  out.nominal = est_prob_mc(s, th);
  out.perturbed = est_prob_is(s, th, w);
  out.index = pli_index(out.nominal, out.perturbed);
  return out;
}

}  // namespace pli
