#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dmimo/dataset_io.hpp"
#include "dmimo/error.hpp"
#include "dmimo/geometry.hpp"
#include "dmimo/metrics.hpp"
#include "dmimo/precoders.hpp"

namespace dmimo {

enum class ChannelSource { SyntheticLos, Dataset };

struct ClusteringConfig {
  /// AP indices of each cluster (pairs of APs in the reference setup).
  std::vector<IndexSet> clusters;
};

struct ScenarioConfig {
  ArrayGeometry geometry = default_perimeter_geometry();
  /// Region UEs are drawn from (synthetic channels only).
  Box roi = default_roi();
  LosChannelParams channel{kDefaultWavelength, AmplitudeModel::FreeSpace, 1.0};
  int k_users = 5;
  int trials = 10'000;
  double noise_floor_db = -20.0;
  double min_spacing_m = 0.10;
  std::vector<PrecoderSpec> precoders;
  /// Target NMSE values of the channel estimates. Empty means perfect CSI.
  std::vector<double> nmse_grid;
  std::optional<ClusteringConfig> clustering;
  std::uint64_t rng_seed = 1;
  ChannelSource source = ChannelSource::SyntheticLos;
  std::shared_ptr<const Dataset> dataset;
  /// Information the network makes available to precoders.
  InformationRequirements grant{true, true, true, true};
  int threads = 0;
  int retry_budget = kDefaultRetryBudget;

  /// Rejects invalid settings with ErrorCode::Config, including precoders
  /// that need information outside `grant`.
  void validate() const;
};

/// Scenario-wide quantities fixed before any precoder runs.
struct PreparedScenario {
  ScenarioConfig config;
  /// Mean over users and trials of ||h_k||^2 (the MRT received power).
  double reference_power = 0.0;
  /// 10^(noise_floor_db / 10) * reference_power.
  double noise_variance = 0.0;
  /// reference_power / M, the mean power of one channel entry.
  double entry_power = 0.0;
  /// NMSE targets evaluated; {0} when nmse_grid is empty.
  std::vector<double> nmse_targets;
  /// Per-entry error variance realizing each target: target * entry_power.
  std::vector<double> error_variances;
  /// Alpha for regularized zero-forcing (the noise variance).
  double rzf_alpha = 0.0;
  /// Alpha for regularized orthogonalization over unit-norm columns.
  double orthogonalization_alpha = 0.0;
  /// Dataset sources only: (tx antenna, grid point) pairs with CSI towards
  /// every rx antenna. UEs are drawn uniformly from these.
  std::vector<std::pair<int, Index>> dataset_candidates;
};

PreparedScenario prepare_scenario(const ScenarioConfig& config);

/// UE positions and true channels of one trial.
struct TrialChannels {
  std::vector<Point3> positions;
  ChannelMatrix channel;
};

/// Seed of trial `trial_index`'s placement stream.
std::uint64_t trial_seed(std::uint64_t root, std::int64_t trial_index);

TrialChannels draw_trial_channels(const PreparedScenario& scenario, std::int64_t trial_index);

struct ClusterAssignment {
  /// Cluster index serving each user.
  std::vector<int> ue_to_cluster;
  /// K x C mean |h|^2 over the antennas of each cluster.
  Eigen::MatrixXd mean_gains;
};

/// Assigns each user to the cluster with the largest mean gain; ties go to
/// the lowest cluster index. `mean_gains` is K x C.
ClusterAssignment cluster_users(const Eigen::MatrixXd& mean_gains);

/// Same, computing mean |h|^2 over the antennas of each cluster of APs.
ClusterAssignment cluster_users(const ChannelMatrix& channel, const ArrayGeometry& geometry,
                                const std::vector<IndexSet>& clusters);

struct PrecoderOutcome {
  bool ok = false;
  std::vector<double> sinr_db;  // one per user when ok
  ErrorCode failure_code = ErrorCode::RankDeficiency;
  std::string failure;
};

struct NmsePointResult {
  double nmse_target = 0.0;
  double realized_nmse = 0.0;
  std::vector<PrecoderOutcome> precoders;  // config.precoders order
};

struct TrialResult {
  std::int64_t trial = 0;
  std::vector<Point3> positions;
  std::vector<int> ue_to_cluster;  // empty without clustering
  std::vector<NmsePointResult> points;
};

/// Places UEs, draws channels, perturbs estimates for every NMSE target,
/// builds every configured precoder from the estimates and evaluates SINR
/// against the true channel with all K users served simultaneously.
/// Numerical precoder failures are recorded, not thrown.
TrialResult run_trial(const PreparedScenario& scenario, std::int64_t trial_index);

struct PrecoderSummary {
  std::string name;
  std::size_t samples = 0;
  std::size_t failures = 0;
  double failure_rate = 0.0;
  /// NaN when no samples.
  double median_db = 0.0;
  double guaranteed_db = 0.0;  // 10th percentile
  std::vector<CdfPoint> cdf;
};

struct SummaryRow {
  double nmse_target = 0.0;
  double error_variance = 0.0;
  double mean_realized_nmse = 0.0;
  std::vector<PrecoderSummary> precoders;
};

struct ScenarioSummary {
  PreparedScenario scenario;
  std::vector<SummaryRow> rows;
  std::vector<TrialResult> trials;
};

/// Merges trial results (in trial order) into per-precoder statistics.
std::vector<SummaryRow> summarize(const PreparedScenario& scenario,
                                  const std::vector<TrialResult>& trials);

/// Runs every trial (in parallel over config.threads) and summarizes.
/// The result does not depend on the number of threads.
ScenarioSummary run_scenario(const ScenarioConfig& config);

}  // namespace dmimo
