#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "pli/study.hpp"

namespace pli::cli {

//! A study configuration together with the document it was parsed from, so
//! that run manifests can echo it verbatim.
struct LoadedConfig {
  StudyConfig study;
  nlohmann::json source;
};

/// Parses a configuration document. A run manifest is accepted as well: its
/// "config" member is used. Throws Error(parse_error) on malformed JSON or
/// Error(invalid_argument) on schema violations.
LoadedConfig parse_config(const nlohmann::json& doc);
LoadedConfig load_config(const std::filesystem::path& path);

std::string to_string(PerturbationKind k);
std::string to_string(QuantileEstimator e);
std::string describe(const Quantity& q);

}  // namespace pli::cli
