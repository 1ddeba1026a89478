#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dmimo/types.hpp"

namespace dmimo {

/// One measurement position of the xy-grid.
struct GridPoint {
  int m = 0;
  int n = 0;
  Point3 position = Point3::Zero();
};

/// CSI between every (tx antenna, rx antenna) pair over a set of grid
/// positions. Values are stored pair-major so one pair's slice over the grid
/// is contiguous. Entries start out missing.
class CsiGrid {
 public:
  CsiGrid() = default;
  CsiGrid(int tx_count, int rx_count, std::vector<GridPoint> points);

  int tx_count() const { return tx_count_; }
  int rx_count() const { return rx_count_; }
  Index point_count() const { return static_cast<Index>(points_.size()); }
  const std::vector<GridPoint>& points() const { return points_; }

  bool present(int tx, int rx, Index point) const { return present_[offset(tx, rx, point)] != 0; }
  cdouble value(int tx, int rx, Index point) const { return values_[offset(tx, rx, point)]; }
  void set(int tx, int rx, Index point, cdouble v);
  void mark_missing(int tx, int rx, Index point);

  std::span<const cdouble> pair_values(int tx, int rx) const;
  std::span<const std::uint8_t> pair_mask(int tx, int rx) const;

  std::optional<Index> find_point(int m, int n) const;
  std::size_t present_count() const;

 private:
  std::size_t offset(int tx, int rx, Index point) const;

  int tx_count_ = 0;
  int rx_count_ = 0;
  std::vector<GridPoint> points_;
  std::vector<cdouble> values_;
  std::vector<std::uint8_t> present_;
};

}  // namespace dmimo
