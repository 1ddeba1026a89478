#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "dmimo/calibration.hpp"
#include "dmimo/csi_grid.hpp"
#include "dmimo/geometry.hpp"

namespace dmimo {

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kCsiFile = "csi.csv";

struct DatasetManifest {
  double wavelength = 0.0;
  int tx_count = 0;
  int rx_count = 0;
  std::vector<Point3> rx_positions;
  std::vector<GridPoint> grid;
  int format_version = kDatasetFormatVersion;

  /// rx_positions.size() == rx_count and unique (m, n) per grid point.
  void validate() const;
};

/// Manifest describing `grid` for an array with the given rx positions.
DatasetManifest make_manifest(const CsiGrid& grid, const ArrayGeometry& geometry);

/// Writes `dir`/manifest.json and `dir`/csi.csv (header tx,rx,m,n,re,im).
/// Missing entries are omitted from the CSV. Creates `dir` if needed.
void write_dataset(const CsiGrid& grid, const DatasetManifest& manifest,
                   const std::filesystem::path& dir);

struct Dataset {
  CsiGrid grid;
  DatasetManifest manifest;
};

Dataset read_dataset(const std::filesystem::path& dir);

/// Rectangular measurement grid: nx * ny points at origin + (m * step_x, n * step_y, 0).
struct GridSpec {
  Point3 origin = Point3::Zero();
  int nx = 0;
  int ny = 0;
  double step_x = 0.0;
  double step_y = 0.0;
  int tx_count = 1;

  std::vector<GridPoint> points() const;
};

struct SyntheticDataset {
  CsiGrid grid;
  DatasetManifest manifest;
  /// Injected hardware offsets; empty when generated without offsets.
  std::optional<PhaseOffsetTable> offsets;
};

/// Exact LoS CSI from every grid position (each tx antenna visits every
/// position) to every antenna of `geometry`, optionally rotated by seeded
/// per-pair hardware offsets.
SyntheticDataset generate_synthetic_dataset(const ArrayGeometry& geometry, const GridSpec& grid_spec,
                                            const LosChannelParams& params,
                                            std::optional<std::uint64_t> offset_seed);

/// Geometry implied by a manifest: rx antennas become the base-station array,
/// split into consecutive APs of `antennas_per_ap` when the count divides.
ArrayGeometry geometry_from_manifest(const DatasetManifest& manifest, int antennas_per_ap = 8);

}  // namespace dmimo
