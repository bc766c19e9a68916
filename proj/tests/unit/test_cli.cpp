#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "pli/cli/commands.hpp"
#include "pli/cli/config.hpp"
#include "pli/cli/io.hpp"
#include "pli/error.hpp"
#include "pli/testmodels.hpp"

namespace pli::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

json two_input_config() {
  return json::parse(R"({
    "inputs": [
      {"name": "a", "kind": "uniform", "a": 0, "b": 1},
      {"name": "b", "kind": "uniform", "a": 1, "b": 3}
    ],
    "quantity": {"type": "quantile", "alpha": 0.9},
    "perturbation": "mean",
    "delta_grid": {"min": -1, "max": 1, "count": 5},
    "estimator": "normalized",
    "ci": {"method": "bootstrap", "resamples": 100, "level": 0.9},
    "seed": 42
  })");
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = fs::temp_directory_path() / (std::string("pli_test_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  fs::path write_sample(std::size_t n, std::uint64_t seed) {
    const std::vector<Marginal> m{Marginal::uniform(0.0, 1.0), Marginal::uniform(1.0, 3.0)};
    const auto s = models::generate_sample(
        m, [](std::span<const double> x) { return 1.0 + x[0] + 0.5 * x[1] * x[1]; }, n, seed);
    std::ostringstream os;
    os << "a,b,y\n";
    for (std::size_t r = 0; r < s.size(); ++r) {
      os << format_number(s.input(r, 0)) << "," << format_number(s.input(r, 1)) << ","
         << format_number(s.outputs()[r]) << "\n";
    }
    const auto p = dir / "sample.csv";
    write(p, os.str());
    return p;
  }

  fs::path write_config(const json& j) {
    const auto p = dir / "config.json";
    write(p, j.dump(2));
    return p;
  }

  fs::path dir;
};

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-0.5), "-0.5");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(std::nan("")), "");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  const double x = 0.30397841595588467;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(ParseConfig, FullDocument) {
  const auto loaded = parse_config(two_input_config());
  const auto& cfg = loaded.study;
  ASSERT_EQ(cfg.inputs.size(), 2u);
  EXPECT_EQ(cfg.inputs[1].name, "b");
  EXPECT_EQ(cfg.inputs[1].marginal.lower(), 1.0);
  EXPECT_EQ(std::get<QuantileSpec>(cfg.quantity).alpha(), 0.9);
  EXPECT_EQ(cfg.deltas, (std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0}));
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.ci.level, 0.9);
  EXPECT_EQ(std::get<BootstrapMethod>(cfg.ci.method).resamples, 100u);
  EXPECT_EQ(loaded.source, two_input_config());
}

TEST(ParseConfig, DefaultsAndVariants) {
  json j = two_input_config();
  j.erase("estimator");
  j.erase("ci");
  j.erase("perturbation");
  j["quantity"] = {{"type", "probability"}, {"eta", 2.5}};
  j["delta_grid"] = {-0.2, 0.3};
  j["inputs"][0] = {{"kind", "normal"}, {"mu", 1.0}, {"sigma", 2.0}};
  const auto cfg = parse_config(j).study;
  EXPECT_EQ(cfg.estimator, QuantileEstimator::normalized);
  EXPECT_EQ(cfg.perturbation, PerturbationKind::mean);
  EXPECT_TRUE(std::holds_alternative<BootstrapMethod>(cfg.ci.method));
  EXPECT_EQ(std::get<BootstrapMethod>(cfg.ci.method).resamples, 200u);
  EXPECT_EQ(cfg.ci.level, 0.95);
  EXPECT_EQ(std::get<ThresholdSpec>(cfg.quantity).direction, Direction::exceed);
  EXPECT_EQ(cfg.deltas, (std::vector<double>{-0.2, 0.3}));
  EXPECT_EQ(cfg.inputs[0].name, "x1");
  EXPECT_EQ(cfg.inputs[0].marginal.sd(), 2.0);

  j["ci"] = {{"method", "loo"}};
  j["estimator"] = "kde_smoothed";
  j["perturbation"] = "sd";
  const auto cfg2 = parse_config(j).study;
  EXPECT_TRUE(std::holds_alternative<LooMethod>(cfg2.ci.method));
  EXPECT_EQ(cfg2.estimator, QuantileEstimator::kde_smoothed);
  EXPECT_EQ(cfg2.perturbation, PerturbationKind::sd);
}

TEST(ParseConfig, SchemaViolations) {
  const auto broken = [](auto&& edit) {
    json j = two_input_config();
    edit(j);
    return code_of([&] { parse_config(j); });
  };
  EXPECT_EQ(broken([](json& j) { j.erase("inputs"); }), ErrorCode::invalid_argument);
  EXPECT_EQ(broken([](json& j) { j["inputs"] = json::array(); }), ErrorCode::invalid_argument);
  EXPECT_EQ(broken([](json& j) { j["inputs"][0]["kind"] = "gamma"; }), ErrorCode::invalid_argument);
  EXPECT_EQ(broken([](json& j) { j["inputs"][0]["b"] = -1; }), ErrorCode::invalid_argument);
  EXPECT_EQ(broken([](json& j) { j["inputs"][0]["a"] = "zero"; }), ErrorCode::invalid_argument);
  EXPECT_EQ(broken([](json& j) { j["quantity"]["alpha"] = 1.0; }), ErrorCode::invalid_argument);
  EXPECT_EQ(broken([](json& j) { j["quantity"]["type"] = "mean"; }), ErrorCode::invalid_argument);
  EXPECT_EQ(broken([](json& j) { j["perturbation"] = "skew"; }), ErrorCode::invalid_argument);
  EXPECT_EQ(broken([](json& j) { j["estimator"] = "magic"; }), ErrorCode::invalid_argument);
  EXPECT_EQ(broken([](json& j) { j["delta_grid"]["count"] = 1; }), ErrorCode::invalid_argument);
  EXPECT_EQ(broken([](json& j) { j["delta_grid"] = {0.5, 0.1}; }), ErrorCode::invalid_argument);
  EXPECT_EQ(broken([](json& j) { j["ci"]["resamples"] = 50; }), ErrorCode::invalid_argument);
  EXPECT_EQ(broken([](json& j) { j["ci"]["method"] = "bca"; }), ErrorCode::invalid_argument);
  EXPECT_EQ(broken([](json& j) { j["seed"] = 1.5; }), ErrorCode::invalid_argument);
}

TEST_F(TempDir, LoadConfigErrors) {
  write(dir / "bad.json", "{ \"inputs\": [ ");
  EXPECT_EQ(code_of([&] { load_config(dir / "bad.json"); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([&] { load_config(dir / "missing.json"); }), ErrorCode::io_error);
}

TEST_F(TempDir, IngestSample) {
  const auto cfg = parse_config(two_input_config()).study;
  write(dir / "s.csv", "\xEF\xBB\xBF\"a\", b ,y\n0.25, 1.5 ,3\n\n\"0.75\",2.5,4.5\n");
  const auto s = ingest_sample(dir / "s.csv", cfg);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.input(0, 1), 1.5);
  EXPECT_EQ(s.input(1, 0), 0.75);
  EXPECT_EQ(s.outputs()[1], 4.5);
}

TEST_F(TempDir, IngestErrors) {
  const auto cfg = parse_config(two_input_config()).study;
  const auto fails = [&](const std::string& text) {
    write(dir / "s.csv", text);
    try {
      ingest_sample(dir / "s.csv", cfg);
    } catch (const Error& e) {
      return std::pair{e.code(), std::string(e.what())};
    }
    return std::pair{ErrorCode::invalid_argument, std::string("no error")};
  };
  auto [c1, m1] = fails("a,y\n0.5,1\n");
  EXPECT_EQ(c1, ErrorCode::dimension_mismatch);
  auto [c2, m2] = fails("a,b,y\n0.5,1.5,1\n0.5,abc,2\n");
  EXPECT_EQ(c2, ErrorCode::parse_error);
  EXPECT_NE(m2.find("line 3"), std::string::npos) << m2;
  EXPECT_NE(m2.find("column 2"), std::string::npos) << m2;
  auto [c3, m3] = fails("a,b,y\n0.5,1.5\n");
  EXPECT_EQ(c3, ErrorCode::parse_error);
  EXPECT_NE(m3.find("line 2"), std::string::npos) << m3;
  auto [c4, m4] = fails("a,b,y\n0.5,1.5,1\n0.5,3.5,2\n");
  EXPECT_EQ(c4, ErrorCode::out_of_support);
  EXPECT_NE(m4.find("row 2"), std::string::npos) << m4;
  auto [c5, m5] = fails("a,b,y\n0.5,1.5,nan\n");
  EXPECT_EQ(c5, ErrorCode::parse_error);
  auto [c6, m6] = fails("a,b,y\n");
  EXPECT_EQ(c6, ErrorCode::parse_error);
  EXPECT_EQ(code_of([&] { ingest_sample(dir / "none.csv", cfg); }), ErrorCode::io_error);
}

TEST(FormatResults, RowsAndFailedPoints) {
  PliCurve c;
  c.input_name = "x1";
  PliPoint good;
  good.delta = -0.5;
  good.index_value = -0.25;
  good.ci_low = -0.3;
  good.ci_high = -0.2;
  good.nominal = 4.0;
  good.perturbed = 3.2;
  good.diagnostics.ess = 812.5;
  PliPoint bad;
  bad.delta = 1.8;
  bad.status = ErrorCode::target_unachievable;
  c.points = {good, bad};
  const std::string text = format_results({c});
  EXPECT_EQ(text, std::string(kResultHeader) +
                      "\nx1,-0.5,-0.25,-0.3,-0.2,4,3.2,812.5,ok\n"
                      "x1,1.8,,,,,,,TargetUnachievable\n");
}

TEST(RenderSvg, PanelsAndEscaping) {
  PliCurve c;
  c.input_name = "a<b";
  for (double d : {-1.0, 0.0, 1.0}) {
    PliPoint p;
    p.delta = d;
    p.index_value = 0.1 * d;
    p.ci_low = p.index_value - 0.05;
    p.ci_high = p.index_value + 0.05;
    c.points.push_back(p);
  }
  const auto svg = render_svg({c, c});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST_F(TempDir, RunWritesDeterministicResults) {
  const auto sample = write_sample(600, 7);
  const auto config = write_config(two_input_config());
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run({sample, config, dir / "r1", true}, out, err), kExitOk) << err.str();
  ASSERT_EQ(cmd_run({sample, config, dir / "r2", false}, out, err), kExitOk) << err.str();
  const auto csv = slurp(dir / "r1" / "results.csv");
  EXPECT_EQ(csv, slurp(dir / "r2" / "results.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 5);
  EXPECT_TRUE(fs::exists(dir / "r1" / "pli.svg"));
  EXPECT_FALSE(fs::exists(dir / "r2" / "pli.svg"));

  const auto manifest = json::parse(slurp(dir / "r1" / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 42);
  EXPECT_EQ(manifest["resolved_deltas"].size(), 5u);
  EXPECT_EQ(manifest["sample"]["rows"], 600);
  EXPECT_EQ(manifest["config"], two_input_config());

  // The manifest reproduces the run.
  ASSERT_EQ(cmd_run({sample, dir / "r1" / "manifest.json", dir / "r3", false}, out, err), kExitOk);
  EXPECT_EQ(csv, slurp(dir / "r3" / "results.csv"));
}

TEST_F(TempDir, RunFlagsUnachievablePoints) {
  const auto sample = write_sample(300, 8);
  json j = two_input_config();
  j["delta_grid"] = {-1.0, 0.0, 1.8};
  const auto config = write_config(j);
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run({sample, config, dir / "r", false}, out, err), kExitOk) << err.str();
  const auto csv = slurp(dir / "r" / "results.csv");
  EXPECT_NE(csv.find("a,1.8,,,,,,,TargetUnachievable"), std::string::npos) << csv;
  EXPECT_NE(csv.find("b,1.8,,,,,,,TargetUnachievable"), std::string::npos) << csv;
}

TEST_F(TempDir, ExitCodes) {
  const auto sample = write_sample(100, 9);
  const auto config = write_config(two_input_config());
  std::ostringstream out, err;
  write(dir / "bad.json", "{");
  EXPECT_EQ(cmd_run({sample, dir / "bad.json", dir / "r", false}, out, err), kExitConfigError);
  EXPECT_EQ(cmd_validate(dir / "bad.json", out, err), kExitConfigError);
  EXPECT_EQ(cmd_validate(config, out, err), kExitOk);
  write(dir / "short.csv", "a,y\n0.5,1\n");
  EXPECT_EQ(cmd_run({dir / "short.csv", config, dir / "r", false}, out, err), kExitDataError);
  EXPECT_EQ(cmd_run({dir / "none.csv", config, dir / "r", false}, out, err), kExitDataError);
  EXPECT_EQ(cmd_selftest({"no-such-model"}, out, err), kExitConfigError);
}

TEST_F(TempDir, LinearGaussianSelftest) {
  std::ostringstream out, err;
  SelftestOptions opts{"linear-gaussian"};
  opts.n = 4000;
  opts.out_dir = dir / "self";
  EXPECT_EQ(cmd_selftest(opts, out, err), kExitOk) << out.str() << err.str();
  const auto csv = slurp(dir / "self" / "results.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 21);
}

TEST(MonotoneWithinCi, Examples) {
  PliCurve c;
  auto add = [&c](double v, double w) {
    PliPoint p;
    p.index_value = v;
    p.ci_low = v - w / 2;
    p.ci_high = v + w / 2;
    c.points.push_back(p);
  };
  add(-0.2, 0.0);
  add(0.0, 0.0);
  add(0.1, 0.1);
  add(0.05, 0.1);
  add(0.3, 0.0);
  EXPECT_TRUE(monotone_within_ci(c, +1));
  EXPECT_FALSE(monotone_within_ci(c, -1));
  add(0.1, 0.05);
  EXPECT_FALSE(monotone_within_ci(c, +1));
}

}  // namespace
}  // namespace pli::cli
