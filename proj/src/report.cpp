#include "dmimo/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "dmimo/config.hpp"
#include "dmimo/error.hpp"
#include "text_util.hpp"

namespace dmimo {

using nlohmann::json;

void write_results_csv(const ScenarioSummary& summary, std::ostream& out) {
  const auto& precoders = summary.scenario.config.precoders;
  out << "trial,user,precoder,sinr_db,nmse\n";
  for (const auto& t : summary.trials) {
    for (const auto& point : t.points) {
      const std::string nmse = detail::format_double(point.realized_nmse);
      for (std::size_t p = 0; p < precoders.size(); ++p) {
        const auto& o = point.precoders[p];
        if (!o.ok) continue;
        for (std::size_t k = 0; k < o.sinr_db.size(); ++k) {
          out << t.trial << ',' << k << ',' << precoders[p].name << ','
              << detail::format_double(o.sinr_db[k]) << ',' << nmse << '\n';
        }
      }
    }
  }
}

void write_results_csv(const ScenarioSummary& summary, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write_results_csv(summary, f);
  if (!f) fail(ErrorCode::Io, "failed writing " + path.string());
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json summary_json(const ScenarioSummary& summary, std::size_t cdf_points) {
  json j;
  j["config"] = describe_scenario(summary.scenario);
  j["rows"] = json::array();
  for (const auto& row : summary.rows) {
    json r;
    r["nmse_target"] = row.nmse_target;
    r["error_variance"] = row.error_variance;
    r["mean_realized_nmse"] = row.mean_realized_nmse;
    r["precoders"] = json::array();
    for (const auto& p : row.precoders) {
      json cdf = json::array();
      for (const auto& c : thin_cdf(p.cdf, cdf_points)) cdf.push_back({c.value, c.probability});
      r["precoders"].push_back({{"name", p.name},
                                {"samples", p.samples},
                                {"failures", p.failures},
                                {"failure_rate", p.failure_rate},
                                {"median_db", number_or_null(p.median_db)},
                                {"p10_db", number_or_null(p.guaranteed_db)},
                                {"cdf", std::move(cdf)}});
    }
    j["rows"].push_back(std::move(r));
  }
  return j;
}

}  // namespace dmimo
