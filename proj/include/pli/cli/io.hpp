#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pli/sample.hpp"
#include "pli/study.hpp"

namespace pli::cli {

/// Reads a CSV sample: a header naming the input columns then the output
/// column, one record per line. Errors: Error(io_error), Error(parse_error)
/// with line and column, Error(dimension_mismatch) when the header does not
/// hold one column per configured input plus the output, Error(out_of_support)
/// naming the offending row.
Sample ingest_sample(const std::filesystem::path& path, const StudyConfig& cfg);

/// Header of the long-format result table.
inline constexpr const char* kResultHeader =
    "input,delta,pli,ci_low,ci_high,nominal,perturbed,ess,status";

/// The result table as text, one row per (input, delta).
std::string format_results(const std::vector<PliCurve>& curves);

/// Multi-panel line plot: solid index line, dashed interval lines, one panel
/// per input. Failed points leave gaps.
std::string render_svg(const std::vector<PliCurve>& curves);

struct EmitOptions {
  bool svg = false;
  nlohmann::json manifest;
};

/// Writes results.csv and manifest.json (and pli.svg on request) into out_dir,
/// creating it if needed. Throws Error(io_error) naming the path.
void emit_results(const std::vector<PliCurve>& curves, const std::filesystem::path& out_dir,
                  const EmitOptions& options);

/// Shortest round-trip decimal form; empty for NaN.
std::string format_number(double v);

}  // namespace pli::cli
