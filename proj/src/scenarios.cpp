#include "dmimo/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "dmimo/parallel.hpp"
#include "dmimo/rng.hpp"

namespace dmimo {

void ScenarioConfig::validate() const {
  auto bad = [](const std::string& why) { fail(ErrorCode::Config, why); };
  try {
    geometry.validate();
  } catch (const Error& e) {
    bad(std::string("invalid geometry: ") + e.what());
  }
  if (k_users < 1) bad("k_users must be >= 1");
  if (trials < 1) bad("trials must be >= 1");
  if (!std::isfinite(noise_floor_db)) bad("noise_floor_db must be finite");
  if (!(min_spacing_m >= 0)) bad("min_spacing_m must be >= 0");
  if (precoders.empty()) bad("no precoders configured");
  if (retry_budget < 0) bad("retry_budget must be >= 0");
  for (double v : nmse_grid) {
    if (!(v >= 0) || !std::isfinite(v)) bad("nmse_grid values must be finite and >= 0");
  }
  if (source == ChannelSource::SyntheticLos) {
    if (!(channel.wavelength > 0)) bad("channel wavelength must be positive");
    if (std::abs(channel.wavelength - geometry.wavelength) > 1e-12 * geometry.wavelength) {
      bad("channel and geometry wavelengths differ");
    }
    if (!(channel.reference_gain > 0)) bad("reference_gain must be positive");
    if ((roi.max - roi.min).minCoeff() < 0) bad("roi max below min");
  } else {
    if (!dataset) bad("dataset channel source without a loaded dataset");
    if (dataset->manifest.rx_count != geometry.antenna_count()) {
      bad("dataset rx_count does not match the geometry antenna count");
    }
  }
  if (clustering) {
    std::set<Index> seen;
    for (const auto& c : clustering->clusters) {
      if (c.empty()) bad("empty cluster");
      for (Index ap : c) {
        if (ap < 0 || ap >= geometry.ap_count()) bad("cluster references unknown AP " + std::to_string(ap));
        if (!seen.insert(ap).second) bad("AP " + std::to_string(ap) + " appears in two clusters");
      }
    }
    if (static_cast<Index>(seen.size()) != geometry.ap_count()) bad("clusters must cover every AP");
  }
  for (const auto& spec : precoders) {
    if (!requirements(spec).satisfied_by(grant)) {
      bad("precoder " + spec.name + " needs information the scenario does not grant");
    }
  }
}

std::uint64_t trial_seed(std::uint64_t root, std::int64_t trial_index) {
  return derive_seed(root, {kStreamPlacement, static_cast<std::uint64_t>(trial_index)});
}

namespace {

std::vector<std::pair<int, Index>> dataset_candidates(const Dataset& ds) {
  std::vector<std::pair<int, Index>> out;
  const auto& grid = ds.grid;
  for (int t = 0; t < grid.tx_count(); ++t) {
    for (Index p = 0; p < grid.point_count(); ++p) {
      bool complete = true;
      for (int r = 0; r < grid.rx_count() && complete; ++r) complete = grid.present(t, r, p);
      if (complete) out.emplace_back(t, p);
    }
  }
  return out;
}

TrialChannels draw_from_dataset(const PreparedScenario& s, std::uint64_t seed) {
  const auto& cfg = s.config;
  const auto& grid = cfg.dataset->grid;
  const auto& cands = s.dataset_candidates;
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
  TrialChannels out;
  std::vector<std::size_t> chosen;
  int rejections = 0;
  while (static_cast<int>(chosen.size()) < cfg.k_users) {
    const std::size_t c = pick(rng);
    const Point3& pos = grid.points()[static_cast<std::size_t>(cands[c].second)].position;
    bool ok = true;
    for (const auto& q : out.positions) {
      if ((pos - q).norm() < cfg.min_spacing_m) {
        ok = false;
        break;
      }
    }
    if (ok) {
      chosen.push_back(c);
      out.positions.push_back(pos);
    } else if (++rejections > cfg.retry_budget) {
      fail(ErrorCode::PlacementInfeasible, "dataset grid cannot host " + std::to_string(cfg.k_users) +
                                               " UEs with the configured spacing");
    }
  }
  out.channel.resize(grid.rx_count(), cfg.k_users);
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    const auto [t, p] = cands[chosen[k]];
    for (int r = 0; r < grid.rx_count(); ++r) out.channel(r, static_cast<Index>(k)) = grid.value(t, r, p);
  }
  return out;
}

}  // namespace

TrialChannels draw_trial_channels(const PreparedScenario& scenario, std::int64_t trial_index) {
  const auto& cfg = scenario.config;
  const std::uint64_t seed = trial_seed(cfg.rng_seed, trial_index);
  if (cfg.source == ChannelSource::Dataset) return draw_from_dataset(scenario, seed);
  TrialChannels out;
  out.positions = place_ues(cfg.roi, cfg.k_users, cfg.min_spacing_m, seed, cfg.retry_budget).positions;
  out.channel = los_channel_matrix(cfg.geometry, out.positions, cfg.channel);
  return out;
}

PreparedScenario prepare_scenario(const ScenarioConfig& config) {
  config.validate();
  PreparedScenario s;
  s.config = config;
  if (config.source == ChannelSource::Dataset) {
    s.dataset_candidates = dataset_candidates(*config.dataset);
    if (s.dataset_candidates.empty()) fail(ErrorCode::NoData, "dataset has no grid point with complete CSI");
  }

  // Noise reference: mean MRT received power ||h_k||^2 over users and trials.
  std::vector<double> power(static_cast<std::size_t>(config.trials), 0.0);
  parallel_for(power.size(), config.threads, [&](std::size_t t) {
    power[t] = draw_trial_channels(s, static_cast<std::int64_t>(t)).channel.colwise().squaredNorm().sum();
  });
  double total = 0.0;
  for (double p : power) total += p;
  s.reference_power = total / (static_cast<double>(config.trials) * config.k_users);
  if (!(s.reference_power > 0)) fail(ErrorCode::DegenerateChannel, "channels carry no power");
  s.noise_variance = noise_variance_from_floor(config.noise_floor_db, s.reference_power);
  s.entry_power = s.reference_power / static_cast<double>(config.geometry.antenna_count());
  s.nmse_targets = config.nmse_grid.empty() ? std::vector<double>{0.0} : config.nmse_grid;
  for (double target : s.nmse_targets) s.error_variances.push_back(target * s.entry_power);
  s.rzf_alpha = s.noise_variance;
  s.orthogonalization_alpha = s.noise_variance / s.reference_power;
  return s;
}

ClusterAssignment cluster_users(const Eigen::MatrixXd& mean_gains) {
  ClusterAssignment out;
  out.mean_gains = mean_gains;
  out.ue_to_cluster.resize(static_cast<std::size_t>(mean_gains.rows()), 0);
  if (mean_gains.cols() == 0) fail(ErrorCode::Domain, "no clusters to assign users to");
  for (Index k = 0; k < mean_gains.rows(); ++k) {
    Index best = 0;
    for (Index c = 1; c < mean_gains.cols(); ++c) {
      if (mean_gains(k, c) > mean_gains(k, best)) best = c;
    }
    out.ue_to_cluster[static_cast<std::size_t>(k)] = static_cast<int>(best);
  }
  return out;
}

namespace {

IndexSet cluster_antennas(const ArrayGeometry& geometry, const IndexSet& aps) {
  IndexSet rows;
  for (Index ap : aps) {
    const auto& members = geometry.ap_partition.at(static_cast<std::size_t>(ap));
    rows.insert(rows.end(), members.begin(), members.end());
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

ClusterAssignment cluster_users(const ChannelMatrix& channel, const ArrayGeometry& geometry,
                                const std::vector<IndexSet>& clusters) {
  Eigen::MatrixXd gains(channel.cols(), static_cast<Index>(clusters.size()));
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const IndexSet rows = cluster_antennas(geometry, clusters[c]);
    for (Index k = 0; k < channel.cols(); ++k) {
      double sum = 0.0;
      for (Index r : rows) sum += std::norm(channel(r, k));
      gains(k, static_cast<Index>(c)) = sum / static_cast<double>(rows.size());
    }
  }
  return cluster_users(gains);
}

namespace {

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficiency:
    case ErrorCode::FullySuppressed:
    case ErrorCode::DegenerateChannel:
    case ErrorCode::Singularity:
    case ErrorCode::Domain:
      return true;
    default:
      return false;
  }
}

}  // namespace

TrialResult run_trial(const PreparedScenario& scenario, std::int64_t trial_index) {
  const auto& cfg = scenario.config;
  const TrialChannels truth = draw_trial_channels(scenario, trial_index);
  const Index k_users = cfg.k_users;
  const Index m = cfg.geometry.antenna_count();

  TrialResult result;
  result.trial = trial_index;
  result.positions = truth.positions;

  for (std::size_t g = 0; g < scenario.nmse_targets.size(); ++g) {
    const ChannelEstimate est = inject_channel_error(
        truth.channel,
        {scenario.error_variances[g],
         derive_seed(cfg.rng_seed, {kStreamChannelError, static_cast<std::uint64_t>(trial_index), g})});

    // Who serves whom: clusters are formed from the estimated gains.
    std::vector<int> cluster_of(static_cast<std::size_t>(k_users), 0);
    std::vector<IndexSet> cluster_rows;
    if (cfg.clustering) {
      cluster_of = cluster_users(est.estimate, cfg.geometry, cfg.clustering->clusters).ue_to_cluster;
      for (const auto& c : cfg.clustering->clusters) cluster_rows.push_back(cluster_antennas(cfg.geometry, c));
      if (g == 0) result.ue_to_cluster = cluster_of;
    }

    NmsePointResult point;
    point.nmse_target = scenario.nmse_targets[g];
    point.realized_nmse = est.nmse;
    for (const auto& spec : cfg.precoders) {
      PrecoderOutcome outcome;
      BuildOptions options;
      options.rzf_alpha = scenario.rzf_alpha;
      options.orthogonalization_alpha = scenario.orthogonalization_alpha;
      PrecodingMatrix w(m, k_users);
      try {
        for (Index k = 0; k < k_users; ++k) {
          std::vector<bool> shared(static_cast<std::size_t>(k_users), true);
          if (cfg.clustering) {
            for (Index l = 0; l < k_users; ++l) {
              shared[static_cast<std::size_t>(l)] =
                  cluster_of[static_cast<std::size_t>(l)] == cluster_of[static_cast<std::size_t>(k)];
            }
            options.serving_antennas = cluster_rows[static_cast<std::size_t>(cluster_of[static_cast<std::size_t>(k)])];
          }
          const InformationAccess info(est.estimate, truth.positions, requirements(spec), k,
                                       std::move(shared));
          w.col(k) = build_precoder(spec, info, cfg.geometry, options);
        }
        outcome.ok = true;
        outcome.sinr_db.reserve(static_cast<std::size_t>(k_users));
        for (Index k = 0; k < k_users; ++k) {
          outcome.sinr_db.push_back(sinr(truth.channel, w, scenario.noise_variance, k).db);
        }
      } catch (const Error& e) {
        if (!is_numerical(e.code())) throw;
        outcome.ok = false;
        outcome.failure_code = e.code();
        outcome.failure = e.what();
      }
      point.precoders.push_back(std::move(outcome));
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

std::vector<SummaryRow> summarize(const PreparedScenario& scenario,
                                  const std::vector<TrialResult>& trials) {
  const auto& cfg = scenario.config;
  std::vector<SummaryRow> rows;
  for (std::size_t g = 0; g < scenario.nmse_targets.size(); ++g) {
    SummaryRow row;
    row.nmse_target = scenario.nmse_targets[g];
    row.error_variance = scenario.error_variances[g];
    double nmse_sum = 0.0;
    for (const auto& t : trials) nmse_sum += t.points.at(g).realized_nmse;
    row.mean_realized_nmse = trials.empty() ? 0.0 : nmse_sum / static_cast<double>(trials.size());

    for (std::size_t p = 0; p < cfg.precoders.size(); ++p) {
      PrecoderSummary ps;
      ps.name = cfg.precoders[p].name;
      std::vector<double> samples;
      for (const auto& t : trials) {
        const auto& o = t.points.at(g).precoders.at(p);
        if (o.ok) {
          samples.insert(samples.end(), o.sinr_db.begin(), o.sinr_db.end());
        } else {
          ++ps.failures;
        }
      }
      ps.samples = samples.size();
      ps.failure_rate = trials.empty() ? 0.0 : static_cast<double>(ps.failures) / static_cast<double>(trials.size());
      if (samples.empty()) {
        ps.median_db = std::numeric_limits<double>::quiet_NaN();
        ps.guaranteed_db = std::numeric_limits<double>::quiet_NaN();
      } else {
        ps.median_db = quantile(samples, 0.5);
        ps.guaranteed_db = guaranteed_sinr(samples, 0.9);
        ps.cdf = empirical_cdf(samples);
      }
      row.precoders.push_back(std::move(ps));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ScenarioSummary run_scenario(const ScenarioConfig& config) {
  ScenarioSummary out;
  out.scenario = prepare_scenario(config);
  out.trials.resize(static_cast<std::size_t>(config.trials));
  parallel_for(out.trials.size(), config.threads, [&](std::size_t t) {
    out.trials[t] = run_trial(out.scenario, static_cast<std::int64_t>(t));
  });
  out.rows = summarize(out.scenario, out.trials);
  return out;
}

}  // namespace dmimo
