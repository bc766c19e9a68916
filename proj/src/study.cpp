#include "pli/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "pli/indices.hpp"
#include "pli/rng.hpp"

namespace pli {
namespace {

// Reduced sample holding only the perturbed column, so resampling copies
// stay small.
Sample single_column(const Sample& s, std::size_t i) {
  return Sample(s.column(i), 1, std::vector<double>(s.outputs().begin(), s.outputs().end()));
}

PliEstimate estimate(const Sample& s, const StudyConfig& cfg, std::size_t column,
                     const TiltedDensity& t) {
  if (const auto* th = std::get_if<ThresholdSpec>(&cfg.quantity)) {
    return pli_for_probability(s, *th, column, t);
  }
  return pli_for_quantile(s, std::get<QuantileSpec>(cfg.quantity), column, t, cfg.estimator);
}

CiConfig curve_ci(const StudyConfig& cfg, std::size_t input_index) {
  CiConfig ci = cfg.ci;
  // Every point of one curve shares its resample sets, which keeps the bands
  // smooth in delta.
  if (auto* b = std::get_if<BootstrapMethod>(&ci.method)) {
    b->seed = CounterStream(cfg.seed).split(input_index).bits(0);
  }
  return ci;
}

PliPoint evaluate_point(const Sample& column_sample, const StudyConfig& cfg,
                        std::size_t input_index, const CiConfig& ci, double delta) {
  PliPoint p;
  p.delta = delta;
  const Marginal& base = cfg.inputs[input_index].marginal;
  try {
    const TiltedDensity t = perturb(base, cfg.perturbation, delta);
    p.diagnostics.sup_ratio = sup_likelihood_ratio(t);
    p.diagnostics.near_boundary = t.diagnostics().near_boundary;
    p.diagnostics.ess = effective_sample_size(weights_for(column_sample, 0, t));

    const PliEstimate est = estimate(column_sample, cfg, 0, t);
    p.nominal = est.nominal;
    p.perturbed = est.perturbed;
    p.index_value = est.index;

    try {
      const Recipe recipe = [&cfg, &t](const Sample& r) { return estimate(r, cfg, 0, t).index; };
      const Interval iv = confidence_interval(column_sample, recipe, ci);
      p.ci_low = std::min(iv.low, p.index_value);
      p.ci_high = std::max(iv.high, p.index_value);
    } catch (const Error& e) {
      p.status = e.code();
      p.message = e.what();
    }
  } catch (const Error& e) {
    p.status = e.code();
    p.message = e.what();
  }
  return p;
}

}  // namespace

void StudyConfig::validate() const {
  if (inputs.empty()) throw Error(ErrorCode::invalid_argument, "study needs at least one input");
  if (deltas.size() < 2) throw Error(ErrorCode::invalid_argument, "delta grid needs >= 2 values");
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (!std::isfinite(deltas[k])) throw Error(ErrorCode::invalid_argument, "non-finite delta");
    if (k > 0 && !(deltas[k] > deltas[k - 1])) {
      throw Error(ErrorCode::invalid_argument, "delta grid must be strictly increasing");
    }
  }
  ci.validate();
}

std::vector<double> regular_grid(double lo, double hi, std::size_t count) {
  if (count < 2 || !(lo < hi)) {
    throw Error(ErrorCode::invalid_argument, "regular grid needs count >= 2 and min < max");
  }
  std::vector<double> grid(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) grid[k] = lo + step * static_cast<double>(k);
  grid.back() = hi;
  if (lo < 0.0 && hi > 0.0) {
    auto nearest = std::min_element(grid.begin(), grid.end(),
                                    [](double a, double b) { return std::abs(a) < std::abs(b); });
    *nearest = 0.0;
  }
  return grid;
}

TiltedDensity perturb(const Marginal& base, PerturbationKind kind, double delta_in_sd_units) {
  return kind == PerturbationKind::mean ? perturb_mean(base, delta_in_sd_units)
                                        : perturb_sd(base, delta_in_sd_units);
}

PliCurve sweep(const Sample& s, const StudyConfig& cfg, std::size_t input_index) {
  PliCurve curve;
  curve.input_index = input_index;
  curve.input_name = cfg.inputs.at(input_index).name;
  curve.quantity = cfg.quantity;
  curve.perturbation = cfg.perturbation;
  const Sample column_sample = single_column(s, input_index);
  const CiConfig ci = curve_ci(cfg, input_index);
  curve.points.reserve(cfg.deltas.size());
  for (double delta : cfg.deltas) {
    curve.points.push_back(evaluate_point(column_sample, cfg, input_index, ci, delta));
  }
  return curve;
}

std::vector<PliCurve> run_study(const Sample& s, const StudyConfig& cfg) {
  cfg.validate();
  validate_support(s, [&cfg] {
    std::vector<Marginal> m;
    for (const auto& in : cfg.inputs) m.push_back(in.marginal);
    return m;
  }());

  const std::size_t d = cfg.inputs.size();
  const std::size_t k = cfg.deltas.size();
  std::vector<PliCurve> curves(d);
  std::vector<Sample> columns;
  std::vector<CiConfig> cis;
  for (std::size_t i = 0; i < d; ++i) {
    curves[i].input_index = i;
    curves[i].input_name = cfg.inputs[i].name;
    curves[i].quantity = cfg.quantity;
    curves[i].perturbation = cfg.perturbation;
    curves[i].points.resize(k);
    columns.push_back(single_column(s, i));
    cis.push_back(curve_ci(cfg, i));
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < d * k; task = next++) {
      const std::size_t i = task / k;
      const std::size_t j = task % k;
      curves[i].points[j] = evaluate_point(columns[i], cfg, i, cis[i], cfg.deltas[j]);
    }
  };
  std::size_t threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, d * k);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return curves;
}

}  // namespace pli
