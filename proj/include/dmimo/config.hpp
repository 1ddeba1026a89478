#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "dmimo/dataset_io.hpp"
#include "dmimo/scenarios.hpp"

namespace dmimo {

inline constexpr int kConfigSchemaVersion = 1;

struct GenerateConfig {
  GridSpec grid;
  /// Seed of the injected per-pair hardware offsets; unset for none.
  std::optional<std::uint64_t> offset_seed;
};

/// Everything a command needs, read from one JSON file (comments allowed).
/// Unknown keys are rejected. Units: meters, dB, linear variance.
struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  ScenarioConfig scenario;
  std::optional<GenerateConfig> generate;
  std::filesystem::path dataset_path;  // set when the channel source is a dataset
  std::filesystem::path output_dir;
  std::size_t cdf_points = 200;
};

/// Parses a config document. Relative paths resolve against `base_dir`.
/// Dataset-backed scenarios load the dataset here.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

RunConfig load_run_config(const std::filesystem::path& path);

/// Reads JSON allowing // and /* */ comments.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Resolved scenario (including derived noise variance) for embedding in reports.
nlohmann::json describe_scenario(const PreparedScenario& scenario);

}  // namespace dmimo
