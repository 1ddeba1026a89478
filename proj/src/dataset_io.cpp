#include "dmimo/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dmimo/error.hpp"
#include "text_util.hpp"

namespace dmimo {

using nlohmann::json;

void DatasetManifest::validate() const {
  if (!(wavelength > 0) || !std::isfinite(wavelength)) {
    fail(ErrorCode::Consistency, "manifest wavelength must be positive");
  }
  if (tx_count < 0 || rx_count < 0) fail(ErrorCode::Consistency, "negative antenna count");
  if (static_cast<int>(rx_positions.size()) != rx_count) {
    fail(ErrorCode::Consistency, "manifest lists " + std::to_string(rx_positions.size()) +
                                     " rx positions for rx_count " + std::to_string(rx_count));
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& p : grid) {
    if (!seen.emplace(p.m, p.n).second) {
      fail(ErrorCode::Consistency, "duplicate grid point (" + std::to_string(p.m) + ", " +
                                       std::to_string(p.n) + ")");
    }
    if (!p.position.allFinite()) fail(ErrorCode::Consistency, "grid position not finite");
  }
}

DatasetManifest make_manifest(const CsiGrid& grid, const ArrayGeometry& geometry) {
  DatasetManifest m;
  m.wavelength = geometry.wavelength;
  m.tx_count = grid.tx_count();
  m.rx_count = grid.rx_count();
  m.rx_positions = geometry.antenna_positions;
  m.grid = grid.points();
  return m;
}

namespace {

json point_json(const Point3& p) { return json::array({p.x(), p.y(), p.z()}); }

Point3 point_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::Parse, what + ": expected [x, y, z]");
  Point3 p;
  for (int a = 0; a < 3; ++a) {
    if (!j[static_cast<std::size_t>(a)].is_number()) fail(ErrorCode::Parse, what + ": non-numeric coordinate");
    p(a) = j[static_cast<std::size_t>(a)].get<double>();
  }
  return p;
}

void check_grid_matches(const CsiGrid& grid, const DatasetManifest& manifest) {
  if (grid.tx_count() != manifest.tx_count || grid.rx_count() != manifest.rx_count ||
      grid.points().size() != manifest.grid.size()) {
    fail(ErrorCode::Consistency, "CSI grid and manifest dimensions differ");
  }
  for (std::size_t i = 0; i < manifest.grid.size(); ++i) {
    const auto& a = grid.points()[i];
    const auto& b = manifest.grid[i];
    if (a.m != b.m || a.n != b.n || a.position != b.position) {
      fail(ErrorCode::Consistency, "CSI grid and manifest disagree on grid point " + std::to_string(i));
    }
  }
}

}  // namespace

void write_dataset(const CsiGrid& grid, const DatasetManifest& manifest,
                   const std::filesystem::path& dir) {
  manifest.validate();
  check_grid_matches(grid, manifest);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  json j;
  j["format_version"] = manifest.format_version;
  j["wavelength"] = manifest.wavelength;
  j["tx_count"] = manifest.tx_count;
  j["rx_count"] = manifest.rx_count;
  j["rx_positions"] = json::array();
  for (const auto& p : manifest.rx_positions) j["rx_positions"].push_back(point_json(p));
  j["grid"] = json::array();
  for (const auto& g : manifest.grid) {
    j["grid"].push_back({{"m", g.m}, {"n", g.n}, {"position", point_json(g.position)}});
  }
  {
    const auto path = dir / kManifestFile;
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    f << j.dump(2) << '\n';
    if (!f) fail(ErrorCode::Io, "failed writing " + path.string());
  }

  const auto path = dir / kCsiFile;
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  f << "tx,rx,m,n,re,im\n";
  std::string row;
  for (int t = 0; t < grid.tx_count(); ++t) {
    for (int r = 0; r < grid.rx_count(); ++r) {
      for (Index p = 0; p < grid.point_count(); ++p) {
        if (!grid.present(t, r, p)) continue;
        const auto& gp = grid.points()[static_cast<std::size_t>(p)];
        const cdouble v = grid.value(t, r, p);
        row.clear();
        row += std::to_string(t) + ',' + std::to_string(r) + ',' + std::to_string(gp.m) + ',' +
               std::to_string(gp.n) + ',' + detail::format_double(v.real()) + ',' +
               detail::format_double(v.imag()) + '\n';
        f << row;
      }
    }
  }
  if (!f) fail(ErrorCode::Io, "failed writing " + path.string());
}

namespace {

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open manifest " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, path.string() + ": " + e.what());
  }
  DatasetManifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kDatasetFormatVersion) {
      fail(ErrorCode::Version, path.string() + ": format_version " + std::to_string(m.format_version) +
                                   " is not supported (expected " +
                                   std::to_string(kDatasetFormatVersion) + ")");
    }
    m.wavelength = j.at("wavelength").get<double>();
    m.tx_count = j.at("tx_count").get<int>();
    m.rx_count = j.at("rx_count").get<int>();
    for (const auto& p : j.at("rx_positions")) m.rx_positions.push_back(point_from_json(p, path.string()));
    for (const auto& g : j.at("grid")) {
      m.grid.push_back({g.at("m").get<int>(), g.at("n").get<int>(),
                        point_from_json(g.at("position"), path.string())});
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, path.string() + ": " + e.what());
  }
  m.validate();
  return m;
}

}  // namespace

Dataset read_dataset(const std::filesystem::path& dir) {
  DatasetManifest manifest = read_manifest(dir / kManifestFile);
  CsiGrid grid(manifest.tx_count, manifest.rx_count, manifest.grid);

  std::map<std::pair<int, int>, Index> point_index;
  for (std::size_t i = 0; i < manifest.grid.size(); ++i) {
    point_index[{manifest.grid[i].m, manifest.grid[i].n}] = static_cast<Index>(i);
  }

  const auto path = dir / kCsiFile;
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::set<int> rx_seen;
  auto where = [&] { return path.string() + ":" + std::to_string(line_no) + ": "; };
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "tx,rx,m,n,re,im") fail(ErrorCode::Parse, where() + "expected header tx,rx,m,n,re,im");
      continue;
    }
    if (line.empty()) continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() != 6) fail(ErrorCode::Parse, where() + "expected 6 fields");
    long long ids[4];
    for (int i = 0; i < 4; ++i) {
      if (!detail::parse_int(fields[static_cast<std::size_t>(i)], ids[i])) {
        fail(ErrorCode::Parse, where() + "non-integer index '" + std::string(fields[static_cast<std::size_t>(i)]) + "'");
      }
    }
    double re = 0.0, im = 0.0;
    if (!detail::parse_double(fields[4], re) || !detail::parse_double(fields[5], im)) {
      fail(ErrorCode::Parse, where() + "non-numeric CSI value");
    }
    if (ids[0] < 0 || ids[0] >= manifest.tx_count) fail(ErrorCode::Consistency, where() + "tx index out of range");
    if (ids[1] < 0 || ids[1] >= manifest.rx_count) fail(ErrorCode::Consistency, where() + "rx index out of range");
    const auto it = point_index.find({static_cast<int>(ids[2]), static_cast<int>(ids[3])});
    if (it == point_index.end()) fail(ErrorCode::Consistency, where() + "grid point not in manifest");
    grid.set(static_cast<int>(ids[0]), static_cast<int>(ids[1]), it->second, cdouble(re, im));
    rx_seen.insert(static_cast<int>(ids[1]));
  }
  if (line_no == 0) fail(ErrorCode::Parse, path.string() + ": empty file");
  if (static_cast<int>(rx_seen.size()) != manifest.rx_count) {
    fail(ErrorCode::Consistency, path.string() + ": manifest rx_count " + std::to_string(manifest.rx_count) +
                                     " but CSV holds " + std::to_string(rx_seen.size()) +
                                     " distinct rx antennas");
  }
  return {std::move(grid), std::move(manifest)};
}

std::vector<GridPoint> GridSpec::points() const {
  std::vector<GridPoint> out;
  out.reserve(static_cast<std::size_t>(std::max(nx, 0) * std::max(ny, 0)));
  for (int m = 0; m < nx; ++m) {
    for (int n = 0; n < ny; ++n) {
      out.push_back({m, n, origin + Point3(m * step_x, n * step_y, 0.0)});
    }
  }
  return out;
}

SyntheticDataset generate_synthetic_dataset(const ArrayGeometry& geometry, const GridSpec& grid_spec,
                                            const LosChannelParams& params,
                                            std::optional<std::uint64_t> offset_seed) {
  geometry.validate();
  if (grid_spec.nx < 1 || grid_spec.ny < 1 || grid_spec.tx_count < 1) {
    fail(ErrorCode::Domain, "grid needs nx, ny, tx_count >= 1");
  }
  if (!(params.wavelength > 0)) fail(ErrorCode::Domain, "wavelength must be positive");
  CsiGrid grid(grid_spec.tx_count, static_cast<int>(geometry.antenna_count()), grid_spec.points());
  for (Index p = 0; p < grid.point_count(); ++p) {
    const ComplexVector h = los_channel(geometry, grid.points()[static_cast<std::size_t>(p)].position, params);
    for (int t = 0; t < grid.tx_count(); ++t) {
      for (int r = 0; r < grid.rx_count(); ++r) grid.set(t, r, p, h(r));
    }
  }
  SyntheticDataset out{std::move(grid), {}, std::nullopt};
  if (offset_seed) {
    auto [rotated, table] = inject_hardware_offsets(out.grid, *offset_seed);
    out.grid = std::move(rotated);
    out.offsets = std::move(table);
  }
  out.manifest = make_manifest(out.grid, geometry);
  out.manifest.wavelength = params.wavelength;
  return out;
}

ArrayGeometry geometry_from_manifest(const DatasetManifest& manifest, int antennas_per_ap) {
  ArrayGeometry g;
  g.wavelength = manifest.wavelength;
  g.antenna_positions = manifest.rx_positions;
  const int n = manifest.rx_count;
  const int per = (antennas_per_ap > 0 && n % antennas_per_ap == 0) ? antennas_per_ap : n;
  for (int start = 0; start < n; start += per) {
    IndexSet ap;
    for (int i = start; i < start + per; ++i) ap.push_back(i);
    g.ap_partition.push_back(std::move(ap));
  }
  return g;
}

}  // namespace dmimo
