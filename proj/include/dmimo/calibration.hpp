#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "dmimo/csi_grid.hpp"
#include "dmimo/geometry.hpp"

namespace dmimo {

/// Phase compensation factor per (tx, rx) antenna pair, in (-pi, pi].
class PhaseOffsetTable {
 public:
  PhaseOffsetTable() = default;
  PhaseOffsetTable(int tx_count, int rx_count);

  int tx_count() const { return tx_count_; }
  int rx_count() const { return rx_count_; }
  bool has(int tx, int rx) const;
  /// Throws ErrorCode::Coverage when the pair has no entry.
  double at(int tx, int rx) const;
  void set(int tx, int rx, double radians);

  PhaseOffsetTable negated() const;

 private:
  std::size_t slot(int tx, int rx) const;

  int tx_count_ = 0;
  int rx_count_ = 0;
  std::vector<double> offsets_;
  std::vector<std::uint8_t> has_;
};

/// Closed-form minimizer of sum |exp(j angle(los)) - exp(j phi) exp(j angle(emp))|^2:
/// phi = angle(sum exp(j angle(los)) exp(-j angle(emp))), wrapped to (-pi, pi].
/// Points flagged absent in `present` (when given) or with zero magnitude in
/// either slice are skipped.
double estimate_phase_offset(std::span<const cdouble> emp, std::span<const cdouble> los,
                             std::span<const std::uint8_t> present = {});

/// Value of the squared-error objective above at `phi` (test and audit use).
double phase_alignment_error(std::span<const cdouble> emp, std::span<const cdouble> los,
                             double phi, std::span<const std::uint8_t> present = {});

/// Theoretical LoS grid matching `like`: the grid position is the tx antenna,
/// rx antenna r sits at geometry.antenna_positions[r]. Only entries present
/// in `like` are filled.
CsiGrid los_reference_grid(const CsiGrid& like, const ArrayGeometry& geometry,
                           const LosChannelParams& params);

struct OffsetEstimate {
  PhaseOffsetTable table;
  /// Pairs without usable data or with a vanishing phasor sum.
  std::vector<std::pair<int, int>> unidentifiable;
};

/// Runs estimate_phase_offset for every antenna pair, in parallel over pairs.
OffsetEstimate estimate_offsets(const CsiGrid& emp, const CsiGrid& los, int threads = 0);

/// Multiplies every value of pair (t, r) by exp(j table(t, r)).
CsiGrid apply_calibration(const CsiGrid& grid, const PhaseOffsetTable& table);

/// Draws one offset per pair uniformly on (-pi, pi] and rotates the CSI by it.
/// Returns the rotated grid and the injected offsets.
std::pair<CsiGrid, PhaseOffsetTable> inject_hardware_offsets(const CsiGrid& grid,
                                                             std::uint64_t rng_seed);

struct PhaseResidual {
  double mean = 0.0;
  double max = 0.0;
  std::size_t points = 0;
};

/// Absolute wrapped phase difference between `grid` and `los` over the
/// entries present in both.
PhaseResidual phase_residual(const CsiGrid& grid, const CsiGrid& los);

void write_offset_table_csv(const PhaseOffsetTable& table, const std::filesystem::path& path);
PhaseOffsetTable read_offset_table_csv(const std::filesystem::path& path, int tx_count,
                                       int rx_count);

}  // namespace dmimo
