#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pli/study.hpp"

namespace pli::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitDataError = 3,
  kExitNumericFailure = 4,
};

struct RunOptions {
  std::filesystem::path sample;
  std::filesystem::path config;
  std::filesystem::path out_dir;
  bool svg = false;
};

struct SelftestOptions {
  std::string model;
  std::optional<std::size_t> n;
  std::uint64_t seed = 20170;
  std::optional<std::filesystem::path> out_dir;
  bool svg = false;
};

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_validate(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_selftest(const SelftestOptions& opts, std::ostream& out, std::ostream& err);

/// True when, walking up the grid, no index drops below the running
/// extreme (taken in the given direction) by more than the point's interval
/// width. Points without an index are skipped.
bool monotone_within_ci(const PliCurve& curve, int direction);

/// Study settings of the built-in synthetic nine-input study: alpha 0.95,
/// mean perturbation, 100 deltas over [-1, 1], bootstrap intervals.
StudyConfig synthetic_study_config(std::uint64_t seed);

}  // namespace pli::cli
