#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "awva/adaptive.hpp"
#include "awva/timedelay.hpp"

namespace awva::cli {

/// Scenario in laboratory units (THz, as); converted once at the boundary.
struct ScenarioConfig {
  double omega0_thz = 2400.0;
  double delta_thz = 55.0;
  double tau_as = 8.0;
  double epsilon = 0.03;  ///< fixed post-selection angle (rad)
};

struct SweepConfig {
  std::vector<std::int64_t> n_values = {10'000, 100'000, 1'000'000};
  int repetitions = 100;
  MeasurementBackend measurement = MeasurementBackend::asymptotic;
};

struct FisherSurfaceConfig {
  double g_min = 0.001, g_max = 0.007;
  int g_steps = 13;
  double b_min = -250.0, b_max = -20.0;
  int b_steps = 231;
};

struct ShiftSurfaceConfig {
  double eps_min = 0.004, eps_max = 0.1;
  int eps_steps = 50;
  double tau_min_as = 1.0, tau_max_as = 20.0;
  int tau_steps = 50;
};

struct RunConfig {
  ScenarioConfig scenario;
  AdaptiveConfig adaptive;
  SweepConfig sweep;
  FisherSurfaceConfig fisher_surface;
  ShiftSurfaceConfig shift_surface;
  std::uint64_t master_seed = 20240801;
  std::string output_dir = "out";
  int workers = 0;  ///< 0 = hardware concurrency
};

/// Reads the JSON config (empty path = defaults only).  Unknown measurement
/// model names, non-increasing n_values etc. raise ConfigError.
RunConfig load_config(const std::string& path);

TimeDelayScenario scenario_internal(const RunConfig& cfg);

/// FNV-1a over the canonically serialized resolved config.
std::uint64_t config_hash(const RunConfig& cfg);

/// Per-trial sweep outcome, exposed for the test suite.
struct TrialOutcome {
  std::string status = "ok";  ///< "ok" or the failure reason
  double tau_hat = 0.0;
  double abs_err = 0.0;
  std::int64_t total_photons = 0;
};

struct SweepPoint {
  std::int64_t n = 0;
  std::vector<TrialOutcome> awva;
  std::vector<TrialOutcome> swva;
  double limit_awva_fs = 0.0;
  double limit_swva_fs = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double limit_ratio = 0.0;  ///< limit_swva / limit_awva, N-independent
  double fisher_tau_swva_model = 0.0;
};

/// The sweep engine behind `sweep-n` (also used directly by tests).
SweepResult run_sweep(const RunConfig& cfg);

int cmd_fisher_surface(const RunConfig& cfg);
int cmd_shift_surface(const RunConfig& cfg);
int cmd_sweep_n(const RunConfig& cfg);
int cmd_adaptive(const RunConfig& cfg);

/// Full command-line entry point (subcommands fisher-surface, shift-surface,
/// sweep-n, adaptive).  Returns the process exit code: 0 success, 2 config
/// error, 3 numeric failure, 4 I/O failure.
int cli_main(int argc, char** argv);

}  // namespace awva::cli
