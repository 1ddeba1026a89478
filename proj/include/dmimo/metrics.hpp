#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dmimo/error.hpp"
#include "dmimo/types.hpp"

namespace dmimo {

struct Sinr {
  double linear = 0.0;
  double db = 0.0;
};

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

/// |h_k^H w_k|^2 / (sum_{l != k} |h_k^H w_l|^2 + noise_variance) with unit
/// symbol power. H and W are M x K.
template <typename DerivedH, typename DerivedW>
Sinr sinr(const Eigen::MatrixBase<DerivedH>& h, const Eigen::MatrixBase<DerivedW>& w,
          double noise_variance, Index k) {
  if (h.rows() != w.rows() || h.cols() != w.cols()) {
    fail(ErrorCode::Domain, "sinr: H and W dimensions differ");
  }
  if (k < 0 || k >= h.cols()) fail(ErrorCode::Domain, "sinr: user index out of range");
  if (!(noise_variance > 0)) fail(ErrorCode::Domain, "sinr: noise variance must be positive");
  // Row k of H^H W holds h_k^H w_l for every l.
  const auto gains = (h.col(k).adjoint() * w).eval();
  double interference = 0.0;
  for (Index l = 0; l < w.cols(); ++l) {
    if (l != k) interference += std::norm(gains(0, l));
  }
  Sinr out;
  out.linear = std::norm(gains(0, k)) / (interference + noise_variance);
  out.db = to_db(out.linear);
  return out;
}

/// noise_variance = 10^(floor_db / 10) * reference_power.
inline double noise_variance_from_floor(double floor_db, double reference_power) {
  return from_db(floor_db) * reference_power;
}

struct ChannelErrorModel {
  /// Per-entry variance of the additive CN(0, variance) estimation error.
  double variance = 0.0;
  std::uint64_t rng_seed = 0;
};

struct ChannelEstimate {
  ChannelMatrix estimate;
  /// Realized mean |error|^2 divided by mean |H|^2.
  double nmse = 0.0;
};

ChannelEstimate inject_channel_error(const ChannelMatrix& h, const ChannelErrorModel& model);

/// Empirical quantile at probability p, linear interpolation between order
/// statistics (h = (N - 1) p).
double quantile(std::span<const double> samples, double p);

/// SINR level exceeded by `coverage` of the samples, i.e. the (1 - coverage)
/// quantile. coverage = 0.9 gives the 90%-guaranteed SINR.
double guaranteed_sinr(std::span<const double> samples_db, double coverage = 0.9);

struct CdfPoint {
  double value = 0.0;
  double probability = 0.0;
};

/// Sorted support points of the empirical CDF, probability i / N for the
/// i-th smallest sample (1-based).
std::vector<CdfPoint> empirical_cdf(std::span<const double> samples);

/// Fraction of samples <= x, read off a CDF produced by empirical_cdf.
double cdf_at(std::span<const CdfPoint> cdf, double x);

/// At most `max_points` support points of `cdf`, spread evenly in rank and
/// always including the last one.
std::vector<CdfPoint> thin_cdf(std::span<const CdfPoint> cdf, std::size_t max_points);

}  // namespace dmimo
