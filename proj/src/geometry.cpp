#include "dmimo/geometry.hpp"

#include <cmath>
#include <random>
#include <string>

#include "dmimo/error.hpp"
#include "dmimo/rng.hpp"

namespace dmimo {

void ArrayGeometry::validate() const {
  if (!(wavelength > 0) || !std::isfinite(wavelength)) {
    fail(ErrorCode::Domain, "wavelength must be positive and finite");
  }
  if (antenna_positions.empty()) fail(ErrorCode::Domain, "geometry has no antennas");
  for (const auto& p : antenna_positions) {
    if (!p.allFinite()) fail(ErrorCode::Domain, "antenna coordinate is not finite");
  }
  std::vector<int> seen(antenna_positions.size(), 0);
  for (const auto& ap : ap_partition) {
    if (ap.empty()) fail(ErrorCode::Domain, "access point without antennas");
    for (Index i : ap) {
      if (i < 0 || i >= antenna_count()) {
        fail(ErrorCode::Domain, "AP partition references antenna " + std::to_string(i) +
                                    " outside 0.." + std::to_string(antenna_count() - 1));
      }
      if (seen[static_cast<std::size_t>(i)]++ > 0) {
        fail(ErrorCode::Domain, "antenna " + std::to_string(i) + " assigned to two APs");
      }
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] == 0) fail(ErrorCode::Domain, "antenna " + std::to_string(i) + " not in any AP");
  }
}

double los_phase(double distance, double wavelength) {
  if (!(distance > 0) || !(wavelength > 0)) {
    fail(ErrorCode::Domain, "los_phase needs positive distance and wavelength");
  }
  return -kTwoPi * distance / wavelength;
}

double los_amplitude(double distance, const LosChannelParams& params) {
  switch (params.amplitude_model) {
    case AmplitudeModel::UnitMagnitude:
      return 1.0;
    case AmplitudeModel::FreeSpace:
      return params.reference_gain * params.wavelength / (2.0 * kTwoPi * distance);
  }
  return 1.0;
}

ComplexVector los_channel(const ArrayGeometry& geometry, const Point3& ue_position,
                          const LosChannelParams& params) {
  ComplexVector h(geometry.antenna_count());
  for (Index i = 0; i < h.size(); ++i) {
    const double d = (geometry.antenna_positions[static_cast<std::size_t>(i)] - ue_position).norm();
    if (!(d > 0)) {
      fail(ErrorCode::Singularity, "UE coincides with antenna " + std::to_string(i));
    }
    h(i) = std::polar(los_amplitude(d, params), los_phase(d, params.wavelength));
  }
  return h;
}

ChannelMatrix los_channel_matrix(const ArrayGeometry& geometry,
                                 const std::vector<Point3>& ue_positions,
                                 const LosChannelParams& params) {
  ChannelMatrix h(geometry.antenna_count(), static_cast<Index>(ue_positions.size()));
  for (std::size_t k = 0; k < ue_positions.size(); ++k) {
    h.col(static_cast<Index>(k)) = los_channel(geometry, ue_positions[k], params);
  }
  return h;
}

UePlacement place_ues(const Box& roi, int k, double min_spacing, std::uint64_t rng_seed,
                      int retry_budget) {
  if (k < 0) fail(ErrorCode::Domain, "negative UE count");
  if (!(min_spacing >= 0)) fail(ErrorCode::Domain, "min_spacing must be >= 0");
  if ((roi.max - roi.min).minCoeff() < 0) fail(ErrorCode::Domain, "RoI max below min");

  Rng rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  UePlacement out;
  out.min_spacing = min_spacing;
  out.positions.reserve(static_cast<std::size_t>(k));
  int rejections = 0;
  while (static_cast<int>(out.positions.size()) < k) {
    Point3 p;
    for (int a = 0; a < 3; ++a) p(a) = roi.min(a) + unit(rng) * (roi.max(a) - roi.min(a));
    bool ok = true;
    for (const auto& q : out.positions) {
      if (min_spacing <= 0) break;
      if ((p - q).norm() < min_spacing) {
        ok = false;
        break;
      }
    }
    if (ok) {
      out.positions.push_back(p);
    } else if (++rejections > retry_budget) {
      fail(ErrorCode::PlacementInfeasible,
           "could not place " + std::to_string(k) + " UEs with spacing " +
               std::to_string(min_spacing) + " m within " + std::to_string(retry_budget) +
               " rejections");
    }
  }
  return out;
}

ArrayGeometry default_perimeter_geometry(double wavelength) {
  constexpr double side = 6.0;
  constexpr int per_ap = 8;
  const double spacing = wavelength / 2.0;

  // Walk the square counter-clockwise; each side holds two APs centred at
  // 1/4 and 3/4 of its length.
  const Point3 corners[4] = {{0, 0, 0}, {side, 0, 0}, {side, side, 0}, {0, side, 0}};
  ArrayGeometry g;
  g.wavelength = wavelength;
  for (int s = 0; s < 4; ++s) {
    const Point3 a = corners[s];
    const Point3 b = corners[(s + 1) % 4];
    const Point3 dir = (b - a).normalized();
    for (double frac : {0.25, 0.75}) {
      const Point3 centre = a + frac * (b - a);
      IndexSet ap;
      for (int i = 0; i < per_ap; ++i) {
        const double offset = (i - (per_ap - 1) / 2.0) * spacing;
        ap.push_back(g.antenna_count());
        g.antenna_positions.push_back(centre + offset * dir);
      }
      g.ap_partition.push_back(std::move(ap));
    }
  }
  return g;
}

Box default_roi() { return Box{Point3(1.5, 1.5, 0.0), Point3(4.5, 4.5, 0.0)}; }

Box bounding_box(const std::vector<Point3>& points) {
  if (points.empty()) fail(ErrorCode::NoData, "bounding box of an empty point set");
  Box b{points.front(), points.front()};
  for (const auto& p : points) {
    b.min = b.min.cwiseMin(p);
    b.max = b.max.cwiseMax(p);
  }
  return b;
}

}  // namespace dmimo
