#include "dmimo/csi_grid.hpp"

#include <algorithm>
#include <string>

#include "dmimo/error.hpp"

namespace dmimo {

CsiGrid::CsiGrid(int tx_count, int rx_count, std::vector<GridPoint> points)
    : tx_count_(tx_count), rx_count_(rx_count), points_(std::move(points)) {
  if (tx_count < 0 || rx_count < 0) fail(ErrorCode::Domain, "negative antenna count");
  for (const auto& p : points_) {
    if (!p.position.allFinite()) fail(ErrorCode::Domain, "grid position is not finite");
  }
  const std::size_t total =
      static_cast<std::size_t>(tx_count) * static_cast<std::size_t>(rx_count) * points_.size();
  values_.assign(total, cdouble(0.0, 0.0));
  present_.assign(total, 0);
}

std::size_t CsiGrid::offset(int tx, int rx, Index point) const {
  if (tx < 0 || tx >= tx_count_ || rx < 0 || rx >= rx_count_ || point < 0 ||
      point >= point_count()) {
    fail(ErrorCode::Domain, "CSI index (" + std::to_string(tx) + ", " + std::to_string(rx) + ", " +
                                std::to_string(point) + ") out of range");
  }
  return (static_cast<std::size_t>(tx) * static_cast<std::size_t>(rx_count_) +
          static_cast<std::size_t>(rx)) *
             points_.size() +
         static_cast<std::size_t>(point);
}

void CsiGrid::set(int tx, int rx, Index point, cdouble v) {
  const auto o = offset(tx, rx, point);
  values_[o] = v;
  present_[o] = 1;
}

void CsiGrid::mark_missing(int tx, int rx, Index point) {
  const auto o = offset(tx, rx, point);
  values_[o] = cdouble(0.0, 0.0);
  present_[o] = 0;
}

std::span<const cdouble> CsiGrid::pair_values(int tx, int rx) const {
  if (points_.empty()) return {};
  return {values_.data() + offset(tx, rx, 0), points_.size()};
}

std::span<const std::uint8_t> CsiGrid::pair_mask(int tx, int rx) const {
  if (points_.empty()) return {};
  return {present_.data() + offset(tx, rx, 0), points_.size()};
}

std::optional<Index> CsiGrid::find_point(int m, int n) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].m == m && points_[i].n == n) return static_cast<Index>(i);
  }
  return std::nullopt;
}

std::size_t CsiGrid::present_count() const {
  return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), std::uint8_t{1}));
}

}  // namespace dmimo
