#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "dmimo/scenarios.hpp"

namespace dmimo {

/// Per-trial rows `trial,user,precoder,sinr_db,nmse`. Failed precoders
/// contribute no rows; their failures are counted in the summary.
void write_results_csv(const ScenarioSummary& summary, std::ostream& out);
void write_results_csv(const ScenarioSummary& summary, const std::filesystem::path& path);

/// Summary document: resolved config, then one row per NMSE target with
/// per-precoder median, 90%-guaranteed SINR, failure rate and CDF points.
nlohmann::json summary_json(const ScenarioSummary& summary, std::size_t cdf_points);

}  // namespace dmimo
