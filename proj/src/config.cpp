#include "dmimo/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "dmimo/error.hpp"

namespace dmimo {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& why) {
  fail(ErrorCode::Config, where + ": " + why);
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) bad(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) bad(where, "unknown key '" + key + "'");
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad(where + "." + key, "wrong type");
  }
}

Point3 get_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) bad(where, "expected [x, y, z] in meters");
  Point3 p;
  for (std::size_t a = 0; a < 3; ++a) {
    if (!j[a].is_number()) bad(where, "coordinates must be numbers");
    p(static_cast<Index>(a)) = j[a].get<double>();
  }
  return p;
}

IndexSet get_index_set(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of indices");
  IndexSet out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) bad(where, "indices must be integers");
    out.push_back(v.get<Index>());
  }
  return out;
}

ArrayGeometry parse_geometry(const json& j) {
  const std::string where = "geometry";
  allow_keys(j, where, {"preset", "wavelength", "antennas", "aps"});
  const double wavelength = get<double>(j, "wavelength", where, kDefaultWavelength);
  const std::string preset = get<std::string>(j, "preset", where, j.contains("antennas") ? "" : "perimeter");
  ArrayGeometry g;
  if (preset == "perimeter") {
    if (j.contains("antennas") || j.contains("aps")) bad(where, "preset excludes antennas/aps");
    g = default_perimeter_geometry(wavelength);
  } else if (preset.empty()) {
    g.wavelength = wavelength;
    for (const auto& p : j.at("antennas")) g.antenna_positions.push_back(get_point(p, where + ".antennas"));
    if (j.contains("aps")) {
      for (const auto& ap : j.at("aps")) g.ap_partition.push_back(get_index_set(ap, where + ".aps"));
    } else {
      IndexSet all;
      for (Index i = 0; i < g.antenna_count(); ++i) all.push_back(i);
      g.ap_partition.push_back(std::move(all));
    }
  } else {
    bad(where + ".preset", "unknown preset '" + preset + "'");
  }
  try {
    g.validate();
  } catch (const Error& e) {
    bad(where, e.what());
  }
  return g;
}

AmplitudeModel parse_amplitude(const std::string& s) {
  if (s == "free_space") return AmplitudeModel::FreeSpace;
  if (s == "unit_magnitude") return AmplitudeModel::UnitMagnitude;
  bad("channel.amplitude", "expected free_space or unit_magnitude, got '" + s + "'");
}

const char* amplitude_name(AmplitudeModel m) {
  return m == AmplitudeModel::FreeSpace ? "free_space" : "unit_magnitude";
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return json::parse(ss.str(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, path.string() + ": " + e.what());
  }
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
  allow_keys(doc, "config", {"schema_version", "geometry", "roi", "channel", "scenario", "generate", "output"});
  RunConfig rc;
  rc.schema_version = get<int>(doc, "schema_version", "config", -1);
  if (rc.schema_version != kConfigSchemaVersion) {
    bad("config.schema_version", "expected " + std::to_string(kConfigSchemaVersion));
  }
  auto& sc = rc.scenario;
  const bool has_geometry = doc.contains("geometry");
  if (has_geometry) sc.geometry = parse_geometry(doc.at("geometry"));

  if (doc.contains("roi")) {
    const auto& j = doc.at("roi");
    allow_keys(j, "roi", {"min", "max"});
    sc.roi.min = get_point(j.at("min"), "roi.min");
    sc.roi.max = get_point(j.at("max"), "roi.max");
  }

  const json channel = doc.value("channel", json::object());
  allow_keys(channel, "channel", {"source", "dataset", "amplitude", "reference_gain", "antennas_per_ap"});
  sc.channel.wavelength = sc.geometry.wavelength;
  sc.channel.amplitude_model = parse_amplitude(get<std::string>(channel, "amplitude", "channel", "free_space"));
  sc.channel.reference_gain = get<double>(channel, "reference_gain", "channel", 1.0);
  const std::string source = get<std::string>(channel, "source", "channel", "synthetic_los");
  if (source == "synthetic_los") {
    sc.source = ChannelSource::SyntheticLos;
  } else if (source == "dataset") {
    sc.source = ChannelSource::Dataset;
    if (!channel.contains("dataset")) bad("channel.dataset", "required for the dataset source");
    rc.dataset_path = base_dir / get<std::string>(channel, "dataset", "channel", "");
    auto ds = std::make_shared<Dataset>(read_dataset(rc.dataset_path));
    if (!has_geometry) {
      sc.geometry = geometry_from_manifest(ds->manifest, get<int>(channel, "antennas_per_ap", "channel", 8));
    }
    sc.channel.wavelength = sc.geometry.wavelength;
    sc.roi = bounding_box([&] {
      std::vector<Point3> pts;
      for (const auto& p : ds->manifest.grid) pts.push_back(p.position);
      return pts;
    }());
    sc.dataset = std::move(ds);
  } else {
    bad("channel.source", "expected synthetic_los or dataset, got '" + source + "'");
  }

  if (doc.contains("scenario")) {
    const auto& j = doc.at("scenario");
    const std::string where = "scenario";
    allow_keys(j, where, {"users", "trials", "noise_floor_db", "min_spacing_m", "seed", "threads",
                          "precoders", "nmse_grid", "clusters", "grant", "cdf_points", "retry_budget"});
    sc.k_users = get<int>(j, "users", where, sc.k_users);
    sc.trials = get<int>(j, "trials", where, sc.trials);
    sc.noise_floor_db = get<double>(j, "noise_floor_db", where, sc.noise_floor_db);
    sc.min_spacing_m = get<double>(j, "min_spacing_m", where, sc.min_spacing_m);
    sc.rng_seed = get<std::uint64_t>(j, "seed", where, sc.rng_seed);
    sc.threads = get<int>(j, "threads", where, sc.threads);
    sc.retry_budget = get<int>(j, "retry_budget", where, sc.retry_budget);
    rc.cdf_points = get<std::size_t>(j, "cdf_points", where, rc.cdf_points);
    for (const auto& name : get<std::vector<std::string>>(j, "precoders", where, {})) {
      sc.precoders.push_back(parse_precoder(name));
    }
    sc.nmse_grid = get<std::vector<double>>(j, "nmse_grid", where, {});
    if (j.contains("clusters")) {
      ClusteringConfig cc;
      for (const auto& c : j.at("clusters")) cc.clusters.push_back(get_index_set(c, where + ".clusters"));
      sc.clustering = std::move(cc);
    }
    if (j.contains("grant")) {
      const auto& g = j.at("grant");
      allow_keys(g, where + ".grant", {"intended_location", "intended_csi", "unintended_location", "unintended_csi"});
      sc.grant.intended_location = get<bool>(g, "intended_location", where + ".grant", true);
      sc.grant.intended_csi = get<bool>(g, "intended_csi", where + ".grant", true);
      sc.grant.unintended_location = get<bool>(g, "unintended_location", where + ".grant", true);
      sc.grant.unintended_csi = get<bool>(g, "unintended_csi", where + ".grant", true);
    }
  }

  if (doc.contains("generate")) {
    const auto& j = doc.at("generate");
    const std::string where = "generate";
    allow_keys(j, where, {"grid", "tx_count", "offsets", "offset_seed"});
    GenerateConfig gc;
    const auto& g = j.at("grid");
    allow_keys(g, where + ".grid", {"origin", "nx", "ny", "step_x", "step_y"});
    gc.grid.origin = get_point(g.at("origin"), where + ".grid.origin");
    gc.grid.nx = get<int>(g, "nx", where + ".grid", 0);
    gc.grid.ny = get<int>(g, "ny", where + ".grid", 0);
    gc.grid.step_x = get<double>(g, "step_x", where + ".grid", 0.0);
    gc.grid.step_y = get<double>(g, "step_y", where + ".grid", 0.0);
    gc.grid.tx_count = get<int>(j, "tx_count", where, 1);
    if (gc.grid.nx < 1 || gc.grid.ny < 1) bad(where + ".grid", "nx and ny must be >= 1");
    if (gc.grid.tx_count < 1) bad(where, "tx_count must be >= 1");
    const std::string offsets = get<std::string>(j, "offsets", where, "none");
    if (offsets == "seeded") {
      gc.offset_seed = get<std::uint64_t>(j, "offset_seed", where, 1);
    } else if (offsets != "none") {
      bad(where + ".offsets", "expected none or seeded");
    }
    rc.generate = gc;
  }

  if (doc.contains("output")) {
    const auto& j = doc.at("output");
    allow_keys(j, "output", {"dir"});
    rc.output_dir = base_dir / get<std::string>(j, "dir", "output", "");
  }
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_json_file(path), path.parent_path());
}

json describe_scenario(const PreparedScenario& s) {
  const auto& c = s.config;
  json j;
  json geometry;
  geometry["wavelength"] = c.geometry.wavelength;
  geometry["antennas"] = json::array();
  for (const auto& p : c.geometry.antenna_positions) geometry["antennas"].push_back({p.x(), p.y(), p.z()});
  geometry["aps"] = c.geometry.ap_partition;
  j["geometry"] = std::move(geometry);
  j["roi"] = {{"min", {c.roi.min.x(), c.roi.min.y(), c.roi.min.z()}},
              {"max", {c.roi.max.x(), c.roi.max.y(), c.roi.max.z()}}};
  j["channel"] = {{"source", c.source == ChannelSource::Dataset ? "dataset" : "synthetic_los"},
                  {"amplitude", amplitude_name(c.channel.amplitude_model)},
                  {"reference_gain", c.channel.reference_gain}};
  json precoders = json::array();
  for (const auto& p : c.precoders) precoders.push_back(p.name);
  json sc = {{"users", c.k_users},
             {"trials", c.trials},
             {"noise_floor_db", c.noise_floor_db},
             {"min_spacing_m", c.min_spacing_m},
             {"seed", c.rng_seed},
             {"precoders", precoders},
             {"nmse_grid", c.nmse_grid}};
  if (c.clustering) sc["clusters"] = c.clustering->clusters;
  sc["grant"] = {{"intended_location", c.grant.intended_location},
                 {"intended_csi", c.grant.intended_csi},
                 {"unintended_location", c.grant.unintended_location},
                 {"unintended_csi", c.grant.unintended_csi}};
  j["scenario"] = std::move(sc);
  j["derived"] = {
      {"noise_reference", "mean over users and trials of ||h_k||^2 (MRT received power)"},
      {"reference_power", s.reference_power},
      {"noise_variance", s.noise_variance},
      {"entry_power", s.entry_power},
      {"rzf_alpha", s.rzf_alpha},
      {"orthogonalization_alpha", s.orthogonalization_alpha},
      {"error_variances", s.error_variances},
  };
  return j;
}

}  // namespace dmimo
