#include "pli/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "pli/cli/config.hpp"
#include "pli/cli/io.hpp"
#include "pli/error.hpp"
#include "pli/indices.hpp"
#include "pli/testmodels.hpp"

#ifndef PLI_VERSION
#define PLI_VERSION "0.0.0"
#endif

namespace pli::cli {
namespace {

using nlohmann::json;

int count_failures(const std::vector<PliCurve>& curves, ErrorCode code) {
  int n = 0;
  for (const auto& c : curves) {
    for (const auto& p : c.points) n += (p.status && *p.status == code) ? 1 : 0;
  }
  return n;
}

json base_manifest(const json& config, const StudyConfig& study) {
  json m;
  m["tool"] = "pli";
  m["version"] = PLI_VERSION;
  m["compiler"] = __VERSION__;
  m["config"] = config;
  m["seed"] = study.seed;
  m["resolved_deltas"] = study.deltas;
  return m;
}

void summarize(const std::vector<PliCurve>& curves, std::ostream& out) {
  for (const auto& c : curves) {
    int ok = 0;
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& p : c.points) {
      if (!p.has_index()) continue;
      ++ok;
      lo = std::min(lo, p.index_value);
      hi = std::max(hi, p.index_value);
    }
    out << "  " << c.input_name << ": " << ok << "/" << c.points.size()
        << " points, index range [" << format_number(lo) << ", " << format_number(hi) << "]\n";
  }
}

json config_json_for(const StudyConfig& cfg) {
  json inputs = json::array();
  for (const auto& in : cfg.inputs) {
    json j{{"name", in.name}};
    if (const auto* u = std::get_if<Uniform>(&in.marginal.family())) {
      j["kind"] = "uniform";
      j["a"] = u->a;
      j["b"] = u->b;
    } else {
      const auto& n = std::get<Normal>(in.marginal.family());
      j["kind"] = "normal";
      j["mu"] = n.mu;
      j["sigma"] = n.sigma;
    }
    inputs.push_back(j);
  }
  json q;
  if (const auto* th = std::get_if<ThresholdSpec>(&cfg.quantity)) {
    q = {{"type", "probability"},
         {"eta", th->eta},
         {"direction", th->direction == Direction::exceed ? "exceed" : "fall_below"}};
  } else {
    q = {{"type", "quantile"}, {"alpha", std::get<QuantileSpec>(cfg.quantity).alpha()}};
  }
  json ci{{"level", cfg.ci.level}};
  if (const auto* b = std::get_if<BootstrapMethod>(&cfg.ci.method)) {
    ci["method"] = "bootstrap";
    ci["resamples"] = b->resamples;
  } else {
    ci["method"] = "loo";
  }
  return json{{"inputs", inputs},       {"quantity", q},
              {"perturbation", to_string(cfg.perturbation)},
              {"delta_grid", cfg.deltas}, {"estimator", to_string(cfg.estimator)},
              {"ci", ci},               {"seed", cfg.seed}};
}

}  // namespace

bool monotone_within_ci(const PliCurve& curve, int direction) {
  bool have = false;
  double extreme = 0.0;
  for (const auto& p : curve.points) {
    if (!p.has_index()) continue;
    const double v = direction * p.index_value;
    const double width = std::isfinite(p.ci_high - p.ci_low) ? p.ci_high - p.ci_low : 0.0;
    if (have && v < extreme - width) return false;
    extreme = have ? std::max(extreme, v) : v;
    have = true;
  }
  return true;
}

StudyConfig synthetic_study_config(std::uint64_t seed) {
  const models::SyntheticStudyModel model;
  StudyConfig cfg;
  const auto names = model.names();
  for (std::size_t i = 0; i < model.dim(); ++i) cfg.inputs.push_back({names[i], model.marginals()[i]});
  cfg.quantity = QuantileSpec(0.95);
  cfg.perturbation = PerturbationKind::mean;
  cfg.deltas = regular_grid(-1.0, 1.0, 100);
  cfg.estimator = QuantileEstimator::normalized;
  cfg.ci.method = BootstrapMethod{200, seed};
  cfg.seed = seed;
  return cfg;
}

int cmd_validate(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  try {
    const LoadedConfig loaded = load_config(config);
    const StudyConfig& cfg = loaded.study;
    out << "config ok: " << cfg.inputs.size() << " inputs, quantity " << describe(cfg.quantity)
        << ", " << to_string(cfg.perturbation) << " perturbation, " << cfg.deltas.size()
        << " deltas in [" << format_number(cfg.deltas.front()) << ", "
        << format_number(cfg.deltas.back()) << "], estimator " << to_string(cfg.estimator) << "\n";
    for (const auto& in : cfg.inputs) out << "  " << in.name << " ~ " << in.marginal.describe() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  LoadedConfig loaded;
  try {
    loaded = load_config(opts.config);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  Sample sample;
  try {
    sample = ingest_sample(opts.sample, loaded.study);
  } catch (const Error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitDataError;
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<PliCurve> curves;
  try {
    curves = run_study(sample, loaded.study);
  } catch (const Error& e) {
    err << "study failed: " << e.what() << "\n";
    return kExitNumericFailure;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest = base_manifest(loaded.source, loaded.study);
  manifest["sample"] = {{"path", opts.sample.string()}, {"rows", sample.size()}, {"dim", sample.dim()}};
  manifest["timing_seconds"] = seconds;
  try {
    emit_results(curves, opts.out_dir, EmitOptions{opts.svg, manifest});
  } catch (const Error& e) {
    err << "output error: " << e.what() << "\n";
    return kExitDataError;
  }

  out << "PLI study: N = " << sample.size() << ", d = " << sample.dim() << ", "
      << loaded.study.deltas.size() << " deltas, " << describe(loaded.study.quantity) << "\n";
  summarize(curves, out);
  out << "results written to " << (opts.out_dir / "results.csv").string() << "\n";
  const int diverged = count_failures(curves, ErrorCode::solver_diverged);
  if (diverged > 0) {
    err << diverged << " grid points failed with SolverDiverged\n";
    return kExitNumericFailure;
  }
  return kExitOk;
}

int cmd_selftest(const SelftestOptions& opts, std::ostream& out, std::ostream& err) {
  StudyConfig cfg;
  Sample sample;
  std::vector<PliCurve> curves;
  bool passed = true;

  try {
    if (opts.model == "linear-gaussian") {
      const models::LinearGaussianModel model(
          {1.0, 0.5, -0.8},
          {Marginal::normal(2.0, 1.0), Marginal::normal(1.0, 0.5), Marginal::normal(0.0, 1.0)});
      sample = models::generate_sample(model, opts.n.value_or(20000), opts.seed);
      cfg.inputs = {{"x1", model.marginals()[0]}, {"x2", model.marginals()[1]},
                    {"x3", model.marginals()[2]}};
      cfg.quantity = QuantileSpec(0.95);
      cfg.deltas = regular_grid(-1.0, 1.0, 21);
      cfg.ci.method = BootstrapMethod{200, opts.seed};
      cfg.seed = opts.seed;
      curves = run_study(sample, cfg);

      const double q0 = models::oracle_quantile(model, 0.95);
      std::size_t covered = 0;
      std::size_t total = 0;
      for (const auto& c : curves) {
        for (const auto& p : c.points) {
          ++total;
          if (!p.ok()) continue;
          const double truth = pli_index(
              q0, models::oracle_quantile(model, 0.95,
                                          models::Perturbation{c.input_index, p.delta}));
          covered += (truth >= p.ci_low && truth <= p.ci_high) ? 1 : 0;
        }
      }
      const double frac = static_cast<double>(covered) / static_cast<double>(total);
      passed = frac >= 0.9;
      out << "linear-gaussian: oracle index inside interval at " << covered << "/" << total
          << " grid points (" << format_number(std::round(frac * 1000) / 10) << "%, need >= 90%)\n";
    } else if (opts.model == "synthetic-study") {
      const models::SyntheticStudyModel model;
      sample = models::generate_sample(model, opts.n.value_or(1000), opts.seed);
      cfg = synthetic_study_config(opts.seed);
      curves = run_study(sample, cfg);
      for (const auto& c : curves) {
        const auto zero = std::find_if(c.points.begin(), c.points.end(),
                                       [](const PliPoint& p) { return p.delta == 0.0; });
        const bool zero_ok = zero != c.points.end() && zero->index_value == 0.0;
        const bool mono = monotone_within_ci(
            c, models::SyntheticStudyModel::kDirection[c.input_index]);
        passed = passed && zero_ok && mono;
        out << "  " << c.input_name << ": zero at delta=0 " << (zero_ok ? "yes" : "NO")
            << ", monotone within interval " << (mono ? "yes" : "NO") << "\n";
      }
      out << "synthetic-study: " << curves.size() << " curves\n";
    } else {
      err << "unknown model '" << opts.model << "' (expected linear-gaussian or synthetic-study)\n";
      return kExitConfigError;
    }
  } catch (const Error& e) {
    err << "selftest failed: " << e.what() << "\n";
    return kExitNumericFailure;
  }

  if (opts.out_dir) {
    json manifest = base_manifest(config_json_for(cfg), cfg);
    manifest["selftest_model"] = opts.model;
    manifest["sample"] = {{"rows", sample.size()}, {"dim", sample.dim()}, {"generated", true}};
    try {
      emit_results(curves, *opts.out_dir, EmitOptions{opts.svg, manifest});
    } catch (const Error& e) {
      err << "output error: " << e.what() << "\n";
      return kExitDataError;
    }
  }
  out << (passed ? "selftest passed\n" : "selftest FAILED\n");
  return passed ? kExitOk : kExitNumericFailure;
}

}  // namespace pli::cli
