#include "pli/cli/config.hpp"

#include <fstream>
#include <sstream>

#include "pli/error.hpp"

namespace pli::cli {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorCode::invalid_argument, "config: " + what);
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) schema_error(where + " is missing \"" + key + "\"");
  return obj.at(key);
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_number()) schema_error(where + "." + key + " must be a number");
  return v.get<double>();
}

std::string text(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_string()) schema_error(where + "." + key + " must be a string");
  return v.get<std::string>();
}

NamedMarginal parse_input(const json& j, std::size_t index) {
  const std::string where = "inputs[" + std::to_string(index) + "]";
  NamedMarginal out{j.value("name", "x" + std::to_string(index + 1)), Marginal::uniform(0.0, 1.0)};
  const std::string kind = text(j, "kind", where);
  try {
    if (kind == "uniform") {
      out.marginal = Marginal::uniform(number(j, "a", where), number(j, "b", where));
    } else if (kind == "normal") {
      out.marginal = Marginal::normal(number(j, "mu", where), number(j, "sigma", where));
    } else {
      schema_error(where + ".kind must be \"uniform\" or \"normal\"");
    }
  } catch (const Error& e) {
    schema_error(where + ": " + e.what());
  }
  return out;
}

Quantity parse_quantity(const json& j) {
  const std::string type = text(j, "type", "quantity");
  if (type == "quantile") {
    const double alpha = number(j, "alpha", "quantity");
    if (!(alpha > 0.0 && alpha < 1.0)) schema_error("quantity.alpha must lie in (0, 1)");
    return QuantileSpec(alpha);
  }
  if (type == "probability") {
    ThresholdSpec th{number(j, "eta", "quantity")};
    const std::string dir = j.value("direction", "exceed");
    if (dir == "exceed") {
      th.direction = Direction::exceed;
    } else if (dir == "fall_below") {
      th.direction = Direction::fall_below;
    } else {
      schema_error("quantity.direction must be \"exceed\" or \"fall_below\"");
    }
    return th;
  }
  schema_error("quantity.type must be \"quantile\" or \"probability\"");
}

std::vector<double> parse_grid(const json& j) {
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& v : j) {
      if (!v.is_number()) schema_error("delta_grid entries must be numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  const json& count = member(j, "count", "delta_grid");
  if (!count.is_number_integer() || count.get<long long>() < 2) {
    schema_error("delta_grid.count must be an integer >= 2");
  }
  try {
    return regular_grid(number(j, "min", "delta_grid"), number(j, "max", "delta_grid"),
                        count.get<std::size_t>());
  } catch (const Error& e) {
    schema_error(std::string("delta_grid: ") + e.what());
  }
}

CiConfig parse_ci(const json& j, std::uint64_t seed) {
  CiConfig ci;
  if (j.is_null()) {
    ci.method = BootstrapMethod{200, seed};
    return ci;
  }
  const std::string method = j.value("method", "bootstrap");
  if (j.contains("level")) ci.level = number(j, "level", "ci");
  if (method == "bootstrap") {
    BootstrapMethod b{200, seed};
    if (j.contains("resamples")) {
      const json& r = j.at("resamples");
      if (!r.is_number_integer() || r.get<long long>() < 1) {
        schema_error("ci.resamples must be a positive integer");
      }
      b.resamples = r.get<std::size_t>();
    }
    ci.method = b;
  } else if (method == "loo") {
    ci.method = LooMethod{};
  } else {
    schema_error("ci.method must be \"bootstrap\" or \"loo\"");
  }
  return ci;
}

}  // namespace

std::string to_string(PerturbationKind k) { return k == PerturbationKind::mean ? "mean" : "sd"; }

std::string to_string(QuantileEstimator e) {
  switch (e) {
    case QuantileEstimator::normalized: return "normalized";
    case QuantileEstimator::unnormalized: return "unnormalized";
    case QuantileEstimator::kde_smoothed: return "kde_smoothed";
  }
  return "unknown";
}

std::string describe(const Quantity& q) {
  std::ostringstream os;
  if (const auto* th = std::get_if<ThresholdSpec>(&q)) {
    os << "P(y " << (th->direction == Direction::exceed ? ">" : "<") << " " << th->eta << ")";
  } else {
    os << std::get<QuantileSpec>(q).alpha() << "-quantile";
  }
  return os.str();
}

LoadedConfig parse_config(const json& doc) {
  if (doc.is_object() && doc.contains("config") && !doc.contains("inputs")) {
    return parse_config(doc.at("config"));
  }
  LoadedConfig out;
  out.source = doc;
  StudyConfig& cfg = out.study;

  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_integer()) schema_error("seed must be an integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  const json& inputs = member(doc, "inputs", "config");
  if (!inputs.is_array() || inputs.empty()) schema_error("inputs must be a non-empty array");
  for (std::size_t i = 0; i < inputs.size(); ++i) cfg.inputs.push_back(parse_input(inputs[i], i));

  cfg.quantity = parse_quantity(member(doc, "quantity", "config"));

  const std::string pert = doc.value("perturbation", "mean");
  if (pert == "mean") {
    cfg.perturbation = PerturbationKind::mean;
  } else if (pert == "sd") {
    cfg.perturbation = PerturbationKind::sd;
  } else {
    schema_error("perturbation must be \"mean\" or \"sd\"");
  }

  cfg.deltas = parse_grid(member(doc, "delta_grid", "config"));

  const std::string est = doc.value("estimator", "normalized");
  if (est == "normalized") {
    cfg.estimator = QuantileEstimator::normalized;
  } else if (est == "unnormalized") {
    cfg.estimator = QuantileEstimator::unnormalized;
  } else if (est == "kde_smoothed") {
    cfg.estimator = QuantileEstimator::kde_smoothed;
  } else {
    schema_error("estimator must be \"normalized\", \"unnormalized\" or \"kde_smoothed\"");
  }

  cfg.ci = parse_ci(doc.contains("ci") ? doc.at("ci") : json(), cfg.seed);
  if (doc.contains("threads")) {
    const json& t = doc.at("threads");
    if (!t.is_number_integer() || t.get<long long>() < 0) {
      schema_error("threads must be a non-negative integer");
    }
    cfg.threads = t.get<std::size_t>();
  }

  try {
    cfg.validate();
  } catch (const Error& e) {
    schema_error(e.what());
  }
  return out;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
  }
  try {
    return parse_config(doc);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, path.string() + ": " + e.what());
  }
}

}  // namespace pli::cli
