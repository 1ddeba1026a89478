#include "dmimo/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "dmimo/error.hpp"
#include "dmimo/parallel.hpp"
#include "dmimo/rng.hpp"
#include "text_util.hpp"

namespace dmimo {

PhaseOffsetTable::PhaseOffsetTable(int tx_count, int rx_count)
    : tx_count_(tx_count), rx_count_(rx_count) {
  if (tx_count < 0 || rx_count < 0) fail(ErrorCode::Domain, "negative antenna count");
  const auto n = static_cast<std::size_t>(tx_count) * static_cast<std::size_t>(rx_count);
  offsets_.assign(n, 0.0);
  has_.assign(n, 0);
}

std::size_t PhaseOffsetTable::slot(int tx, int rx) const {
  if (tx < 0 || tx >= tx_count_ || rx < 0 || rx >= rx_count_) {
    fail(ErrorCode::Coverage, "no phase offset for pair (" + std::to_string(tx) + ", " +
                                  std::to_string(rx) + ")");
  }
  return static_cast<std::size_t>(tx) * static_cast<std::size_t>(rx_count_) +
         static_cast<std::size_t>(rx);
}

bool PhaseOffsetTable::has(int tx, int rx) const {
  if (tx < 0 || tx >= tx_count_ || rx < 0 || rx >= rx_count_) return false;
  return has_[slot(tx, rx)] != 0;
}

double PhaseOffsetTable::at(int tx, int rx) const {
  const auto s = slot(tx, rx);
  if (!has_[s]) {
    fail(ErrorCode::Coverage, "no phase offset for pair (" + std::to_string(tx) + ", " +
                                  std::to_string(rx) + ")");
  }
  return offsets_[s];
}

void PhaseOffsetTable::set(int tx, int rx, double radians) {
  if (!std::isfinite(radians)) fail(ErrorCode::Domain, "phase offset must be finite");
  const auto s = slot(tx, rx);
  offsets_[s] = wrap_angle(radians);
  has_[s] = 1;
}

PhaseOffsetTable PhaseOffsetTable::negated() const {
  PhaseOffsetTable out(tx_count_, rx_count_);
  for (int t = 0; t < tx_count_; ++t) {
    for (int r = 0; r < rx_count_; ++r) {
      if (has(t, r)) out.set(t, r, -at(t, r));
    }
  }
  return out;
}

namespace {

bool usable(std::span<const cdouble> emp, std::span<const cdouble> los,
            std::span<const std::uint8_t> present, std::size_t i) {
  if (!present.empty() && !present[i]) return false;
  return std::abs(emp[i]) > 0 && std::abs(los[i]) > 0;
}

void check_slices(std::span<const cdouble> emp, std::span<const cdouble> los,
                  std::span<const std::uint8_t> present) {
  if (emp.size() != los.size() || (!present.empty() && present.size() != emp.size())) {
    fail(ErrorCode::Domain, "phase offset slices differ in length");
  }
}

cdouble unit_phasor(cdouble z) { return z / std::abs(z); }

}  // namespace

double estimate_phase_offset(std::span<const cdouble> emp, std::span<const cdouble> los,
                             std::span<const std::uint8_t> present) {
  check_slices(emp, los, present);
  cdouble sum(0.0, 0.0);
  std::size_t used = 0;
  for (std::size_t i = 0; i < emp.size(); ++i) {
    if (!usable(emp, los, present, i)) continue;
    sum += unit_phasor(los[i]) * std::conj(unit_phasor(emp[i]));
    ++used;
  }
  if (used == 0) fail(ErrorCode::NoData, "no grid points to estimate a phase offset from");
  if (std::abs(sum) <= 1e-9 * static_cast<double>(used)) {
    fail(ErrorCode::Unidentifiable, "phase offset unidentifiable: phasors cancel");
  }
  return wrap_angle(std::arg(sum));
}

double phase_alignment_error(std::span<const cdouble> emp, std::span<const cdouble> los,
                             double phi, std::span<const std::uint8_t> present) {
  check_slices(emp, los, present);
  const cdouble rot = std::polar(1.0, phi);
  double total = 0.0;
  for (std::size_t i = 0; i < emp.size(); ++i) {
    if (!usable(emp, los, present, i)) continue;
    total += std::norm(unit_phasor(los[i]) - rot * unit_phasor(emp[i]));
  }
  return total;
}

CsiGrid los_reference_grid(const CsiGrid& like, const ArrayGeometry& geometry,
                           const LosChannelParams& params) {
  if (geometry.antenna_count() != like.rx_count()) {
    fail(ErrorCode::Consistency, "geometry has " + std::to_string(geometry.antenna_count()) +
                                     " antennas but the grid has " +
                                     std::to_string(like.rx_count()) + " rx antennas");
  }
  CsiGrid out(like.tx_count(), like.rx_count(), like.points());
  for (Index p = 0; p < like.point_count(); ++p) {
    const ComplexVector h = los_channel(geometry, like.points()[static_cast<std::size_t>(p)].position, params);
    for (int t = 0; t < like.tx_count(); ++t) {
      for (int r = 0; r < like.rx_count(); ++r) {
        if (like.present(t, r, p)) out.set(t, r, p, h(r));
      }
    }
  }
  return out;
}

OffsetEstimate estimate_offsets(const CsiGrid& emp, const CsiGrid& los, int threads) {
  if (emp.tx_count() != los.tx_count() || emp.rx_count() != los.rx_count() ||
      emp.point_count() != los.point_count()) {
    fail(ErrorCode::Consistency, "empirical and LoS grids differ in shape");
  }
  const int tx = emp.tx_count();
  const int rx = emp.rx_count();
  const auto pairs = static_cast<std::size_t>(tx) * static_cast<std::size_t>(rx);
  std::vector<double> phi(pairs, 0.0);
  std::vector<std::uint8_t> ok(pairs, 0);

  parallel_for(pairs, threads, [&](std::size_t i) {
    const int t = static_cast<int>(i / static_cast<std::size_t>(rx));
    const int r = static_cast<int>(i % static_cast<std::size_t>(rx));
    // Entries must be present in both grids.
    const auto me = emp.pair_mask(t, r);
    const auto ml = los.pair_mask(t, r);
    std::vector<std::uint8_t> mask(me.size());
    for (std::size_t p = 0; p < me.size(); ++p) mask[p] = me[p] && ml[p];
    try {
      phi[i] = estimate_phase_offset(emp.pair_values(t, r), los.pair_values(t, r), mask);
      ok[i] = 1;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoData && e.code() != ErrorCode::Unidentifiable) throw;
    }
  });

  OffsetEstimate out{PhaseOffsetTable(tx, rx), {}};
  for (std::size_t i = 0; i < pairs; ++i) {
    const int t = static_cast<int>(i / static_cast<std::size_t>(rx));
    const int r = static_cast<int>(i % static_cast<std::size_t>(rx));
    if (ok[i]) {
      out.table.set(t, r, phi[i]);
    } else {
      out.unidentifiable.emplace_back(t, r);
    }
  }
  return out;
}

CsiGrid apply_calibration(const CsiGrid& grid, const PhaseOffsetTable& table) {
  CsiGrid out = grid;
  for (int t = 0; t < grid.tx_count(); ++t) {
    for (int r = 0; r < grid.rx_count(); ++r) {
      const auto mask = grid.pair_mask(t, r);
      if (std::find(mask.begin(), mask.end(), std::uint8_t{1}) == mask.end()) continue;
      const cdouble rot = std::polar(1.0, table.at(t, r));
      for (Index p = 0; p < grid.point_count(); ++p) {
        if (grid.present(t, r, p)) out.set(t, r, p, rot * grid.value(t, r, p));
      }
    }
  }
  return out;
}

std::pair<CsiGrid, PhaseOffsetTable> inject_hardware_offsets(const CsiGrid& grid,
                                                             std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PhaseOffsetTable table(grid.tx_count(), grid.rx_count());
  for (int t = 0; t < grid.tx_count(); ++t) {
    for (int r = 0; r < grid.rx_count(); ++r) {
      // unit in [0, 1) maps onto (-pi, pi].
      table.set(t, r, kPi - kTwoPi * unit(rng));
    }
  }
  return {apply_calibration(grid, table), table};
}

PhaseResidual phase_residual(const CsiGrid& grid, const CsiGrid& los) {
  if (grid.tx_count() != los.tx_count() || grid.rx_count() != los.rx_count() ||
      grid.point_count() != los.point_count()) {
    fail(ErrorCode::Consistency, "grids differ in shape");
  }
  PhaseResidual out;
  double sum = 0.0;
  for (int t = 0; t < grid.tx_count(); ++t) {
    for (int r = 0; r < grid.rx_count(); ++r) {
      for (Index p = 0; p < grid.point_count(); ++p) {
        if (!grid.present(t, r, p) || !los.present(t, r, p)) continue;
        const double d =
            std::abs(std::arg(grid.value(t, r, p) * std::conj(los.value(t, r, p))));
        sum += d;
        out.max = std::max(out.max, d);
        ++out.points;
      }
    }
  }
  if (out.points > 0) out.mean = sum / static_cast<double>(out.points);
  return out;
}

void write_offset_table_csv(const PhaseOffsetTable& table, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  f << "tx,rx,offset_radians\n";
  for (int t = 0; t < table.tx_count(); ++t) {
    for (int r = 0; r < table.rx_count(); ++r) {
      if (table.has(t, r)) f << t << ',' << r << ',' << detail::format_double(table.at(t, r)) << '\n';
    }
  }
  if (!f) fail(ErrorCode::Io, "failed writing " + path.string());
}

PhaseOffsetTable read_offset_table_csv(const std::filesystem::path& path, int tx_count,
                                       int rx_count) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot open " + path.string());
  PhaseOffsetTable table(tx_count, rx_count);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line.rfind("tx,rx,offset_radians", 0) != 0) {
        fail(ErrorCode::Parse, path.string() + ":1: expected header tx,rx,offset_radians");
      }
      continue;
    }
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_csv(line);
    long long t = 0, r = 0;
    double phi = 0.0;
    if (fields.size() != 3 || !detail::parse_int(fields[0], t) || !detail::parse_int(fields[1], r) ||
        !detail::parse_double(fields[2], phi) || t < 0 || t >= tx_count || r < 0 || r >= rx_count) {
      fail(ErrorCode::Parse, path.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
    table.set(static_cast<int>(t), static_cast<int>(r), phi);
  }
  return table;
}

}  // namespace dmimo
