// Command-line front end: synthetic dataset generation, phase calibration of
// CSI datasets, and Monte Carlo precoder comparisons.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dmimo/calibration.hpp"
#include "dmimo/config.hpp"
#include "dmimo/dataset_io.hpp"
#include "dmimo/error.hpp"
#include "dmimo/report.hpp"
#include "dmimo/scenarios.hpp"

namespace fs = std::filesystem;
using namespace dmimo;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string dataset;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

fs::path output_dir(const Options& opt, const RunConfig* rc) {
  if (!opt.out.empty()) return opt.out;
  if (rc && !rc->output_dir.empty()) return rc->output_dir;
  fail(ErrorCode::Config, "no output directory: pass --out or set output.dir");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

int cmd_generate(const Options& opt) {
  const RunConfig rc = load_run_config(opt.config);
  if (!rc.generate) fail(ErrorCode::Config, opt.config + ": missing 'generate' section");
  GenerateConfig gen = *rc.generate;
  if (opt.seed) gen.offset_seed = opt.seed;
  const fs::path out = output_dir(opt, &rc);

  SyntheticDataset ds = generate_synthetic_dataset(rc.scenario.geometry, gen.grid,
                                                   rc.scenario.channel, gen.offset_seed);
  write_dataset(ds.grid, ds.manifest, out);
  if (ds.offsets) write_offset_table_csv(*ds.offsets, out / "offsets_truth.csv");
  std::cout << "wrote " << ds.grid.present_count() << " CSI values (" << ds.grid.tx_count() << " tx x "
            << ds.grid.rx_count() << " rx x " << ds.grid.point_count() << " positions) to "
            << out.string() << '\n';
  return 0;
}

int cmd_calibrate(const Options& opt) {
  if (opt.dataset.empty()) fail(ErrorCode::Config, "calibrate needs --dataset <dir>");
  const Dataset ds = read_dataset(opt.dataset);
  ArrayGeometry geometry = geometry_from_manifest(ds.manifest);
  if (!opt.config.empty()) {
    const nlohmann::json doc = read_json_file(opt.config);
    if (doc.contains("geometry")) geometry = parse_run_config(doc, fs::path(opt.config).parent_path()).scenario.geometry;
  }
  const fs::path out = output_dir(opt, nullptr);

  // Phase-only reference: amplitude does not enter the estimate.
  const LosChannelParams params{geometry.wavelength, AmplitudeModel::UnitMagnitude, 1.0};
  const CsiGrid los = los_reference_grid(ds.grid, geometry, params);
  const int threads = opt.threads.value_or(0);
  const OffsetEstimate est = estimate_offsets(ds.grid, los, threads);
  if (!est.unidentifiable.empty()) {
    std::cerr << "error: " << est.unidentifiable.size() << " antenna pair(s) unidentifiable:";
    for (const auto& [t, r] : est.unidentifiable) std::cerr << " (" << t << "," << r << ")";
    std::cerr << '\n';
    return exit_code_for(ErrorCode::Unidentifiable);
  }
  const CsiGrid calibrated = apply_calibration(ds.grid, est.table);
  ensure_dir(out);
  write_offset_table_csv(est.table, out / "offsets.csv");
  write_dataset(calibrated, ds.manifest, out / "calibrated");

  const PhaseResidual before = phase_residual(ds.grid, los);
  const PhaseResidual after = phase_residual(calibrated, los);
  std::cout << "calibrated " << est.table.tx_count() * est.table.rx_count()
            << " antenna pairs; mean residual phase error vs LoS: " << after.mean
            << " rad (max " << after.max << ", raw mean " << before.mean << ")\n";
  return 0;
}

int cmd_simulate(const Options& opt) {
  RunConfig rc = load_run_config(opt.config);
  if (opt.trials) rc.scenario.trials = *opt.trials;
  if (opt.seed) rc.scenario.rng_seed = *opt.seed;
  if (opt.threads) rc.scenario.threads = *opt.threads;
  rc.scenario.validate();
  const fs::path out = output_dir(opt, &rc);

  const ScenarioSummary summary = run_scenario(rc.scenario);
  ensure_dir(out);
  write_results_csv(summary, out / "results.csv");
  {
    const fs::path path = out / "summary.json";
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    f << summary_json(summary, rc.cdf_points).dump(2) << '\n';
  }

  std::printf("noise variance %.6g (reference power %.6g)\n", summary.scenario.noise_variance,
              summary.scenario.reference_power);
  for (const auto& row : summary.rows) {
    if (summary.rows.size() > 1) std::printf("NMSE %.4g\n", row.nmse_target);
    std::printf("  %-14s %10s %10s %9s\n", "precoder", "median_dB", "p10_dB", "failures");
    for (const auto& p : row.precoders) {
      std::printf("  %-14s %10.3f %10.3f %8.1f%%\n", p.name.c_str(), p.median_db, p.guaranteed_db,
                  100.0 * p.failure_rate);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Location-informed precoding simulator for distributed massive MIMO"};
  app.require_subcommand(1);
  Options opt;

  auto* gen = app.add_subcommand("generate", "Generate a synthetic LoS CSI dataset");
  gen->add_option("--config", opt.config, "Config file with a 'generate' section")->required();
  gen->add_option("--out", opt.out, "Output dataset directory");
  gen->add_option("--seed", opt.seed, "Override the hardware offset seed (implies offsets)");

  auto* cal = app.add_subcommand("calibrate", "Estimate and remove per-pair phase offsets");
  cal->add_option("--dataset", opt.dataset, "Dataset directory (manifest.json + csi.csv)")->required();
  cal->add_option("--config", opt.config, "Optional config whose geometry overrides the manifest");
  cal->add_option("--out", opt.out, "Output directory")->required();
  cal->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");

  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo scenario");
  sim->add_option("--config", opt.config, "Scenario config file")->required();
  sim->add_option("--out", opt.out, "Output directory for results.csv and summary.json");
  sim->add_option("--trials", opt.trials, "Override the trial count");
  sim->add_option("--seed", opt.seed, "Override the RNG seed");
  sim->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_generate(opt);
    if (cal->parsed()) return cmd_calibrate(opt);
    if (sim->parsed()) return cmd_simulate(opt);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
