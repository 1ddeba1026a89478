#include "dmimo/metrics.hpp"

#include <algorithm>
#include <random>

#include "dmimo/rng.hpp"

namespace dmimo {

ChannelEstimate inject_channel_error(const ChannelMatrix& h, const ChannelErrorModel& model) {
  if (!(model.variance >= 0)) fail(ErrorCode::Domain, "channel error variance must be >= 0");
  ChannelEstimate out{h, 0.0};
  if (model.variance == 0 || h.size() == 0) return out;

  Rng rng(model.rng_seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(model.variance / 2.0));
  ChannelMatrix err(h.rows(), h.cols());
  for (Index c = 0; c < err.cols(); ++c) {
    for (Index r = 0; r < err.rows(); ++r) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      err(r, c) = cdouble(re, im);
    }
  }
  out.estimate = h + err;
  const double channel_power = h.squaredNorm();
  if (channel_power > 0) out.nmse = err.squaredNorm() / channel_power;
  return out;
}

double quantile(std::span<const double> samples, double p) {
  if (samples.empty()) fail(ErrorCode::NoData, "quantile of an empty sample set");
  if (!(p >= 0 && p <= 1)) fail(ErrorCode::Domain, "quantile probability outside [0, 1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double guaranteed_sinr(std::span<const double> samples_db, double coverage) {
  if (samples_db.empty()) fail(ErrorCode::NoData, "guaranteed SINR of an empty sample set");
  if (!(coverage > 0 && coverage < 1)) fail(ErrorCode::Domain, "coverage must lie in (0, 1)");
  return quantile(samples_db, 1.0 - coverage);
}

std::vector<CdfPoint> empirical_cdf(std::span<const double> samples) {
  if (samples.empty()) fail(ErrorCode::NoData, "CDF of an empty sample set");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<CdfPoint> out(sorted.size());
  const auto n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out[i] = {sorted[i], static_cast<double>(i + 1) / n};
  }
  return out;
}

double cdf_at(std::span<const CdfPoint> cdf, double x) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), x,
                                   [](double v, const CdfPoint& p) { return v < p.value; });
  return it == cdf.begin() ? 0.0 : std::prev(it)->probability;
}

std::vector<CdfPoint> thin_cdf(std::span<const CdfPoint> cdf, std::size_t max_points) {
  if (cdf.size() <= max_points || max_points < 2) return {cdf.begin(), cdf.end()};
  std::vector<CdfPoint> out;
  out.reserve(max_points);
  const double step = static_cast<double>(cdf.size() - 1) / static_cast<double>(max_points - 1);
  for (std::size_t i = 0; i < max_points; ++i) {
    const auto idx = static_cast<std::size_t>(std::llround(step * static_cast<double>(i)));
    out.push_back(cdf[std::min(idx, cdf.size() - 1)]);
  }
  return out;
}

}  // namespace dmimo
