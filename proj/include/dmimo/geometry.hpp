#pragma once

#include <cstdint>
#include <vector>

#include "dmimo/types.hpp"

namespace dmimo {

/// Base-station antenna positions grouped into access points.
struct ArrayGeometry {
  std::vector<Point3> antenna_positions;
  std::vector<IndexSet> ap_partition;
  double wavelength = 0.0;

  Index antenna_count() const { return static_cast<Index>(antenna_positions.size()); }
  Index ap_count() const { return static_cast<Index>(ap_partition.size()); }

  /// Throws ErrorCode::Domain if the partition is not a disjoint cover of the
  /// antenna indices, the wavelength is not positive, or a coordinate is not finite.
  void validate() const;
};

/// Axis-aligned box in meters. A degenerate extent (min == max) along an axis
/// pins that coordinate.
struct Box {
  Point3 min = Point3::Zero();
  Point3 max = Point3::Zero();
};

struct UePlacement {
  std::vector<Point3> positions;
  double min_spacing = 0.0;
};

enum class AmplitudeModel { UnitMagnitude, FreeSpace };

struct LosChannelParams {
  double wavelength = 0.0;
  AmplitudeModel amplitude_model = AmplitudeModel::FreeSpace;
  /// Scale applied to the free-space law lambda / (4 pi d).
  double reference_gain = 1.0;
};

inline constexpr double kDefaultWavelength = 0.115;
inline constexpr int kDefaultRetryBudget = 10'000;

/// Phase of a line-of-sight path of length d: -2 pi d / lambda, not wrapped.
double los_phase(double distance, double wavelength);

/// Amplitude of the line-of-sight path under the chosen model.
double los_amplitude(double distance, const LosChannelParams& params);

/// Channel from the UE at `ue_position` to every antenna of `geometry`.
ComplexVector los_channel(const ArrayGeometry& geometry, const Point3& ue_position,
                          const LosChannelParams& params);

/// M x K channel matrix for a set of UE positions.
ChannelMatrix los_channel_matrix(const ArrayGeometry& geometry,
                                 const std::vector<Point3>& ue_positions,
                                 const LosChannelParams& params);

/// Draws k points uniformly over `roi` by rejection sampling so that every
/// pair is at least `min_spacing` apart. Deterministic for a given seed.
UePlacement place_ues(const Box& roi, int k, double min_spacing, std::uint64_t rng_seed,
                      int retry_budget = kDefaultRetryBudget);

/// Eight linear APs of eight antennas at lambda/2 spacing, two per side of a
/// 6 m x 6 m square at height 0. AP order walks the perimeter, so APs
/// (0,1), (2,3), (4,5), (6,7) share a side.
ArrayGeometry default_perimeter_geometry(double wavelength = kDefaultWavelength);

/// The central 3 m x 3 m square of the default geometry, at height 0.
Box default_roi();

/// Bounding box of a set of points.
Box bounding_box(const std::vector<Point3>& points);

}  // namespace dmimo
