#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "awva/measure.hpp"
#include "awva/rng.hpp"
#include "awva/timedelay.hpp"

namespace awva {

/// How a single spectrum-shift measurement is realized.
///  - exact: accept/reject photon sampling; an iteration that accepts zero
///    photons ends the run with insufficient statistics.
///  - asymptotic: the accepted-mean statistic drawn from its large-sample
///    law, Normal(shift, var / (n * P_d)).  This is the regime in which the
///    optimal-angle error curves are defined at all: near the optimum
///    P_d ~ 5e-8, so a desk-scale photon budget accepts nothing (see README).
///  - noise_free: the closed-form shift itself; deterministic, for testing
///    the control loop.
enum class MeasurementBackend { exact, asymptotic, noise_free };

const char* to_string(MeasurementBackend backend);
MeasurementBackend backend_from_string(const std::string& name);

struct AdaptiveConfig {
  double epsilon_init = 0.03;
  double step = 1e-6;                         ///< delta-epsilon increment
  std::int64_t n_per_iteration = 100'000'000; ///< photons per measurement
  int max_iterations = 50'000;
  int confirmations = 1;  ///< consecutive sign flips required to stop
  MeasurementBackend backend = MeasurementBackend::exact;
  /// Optional geometric step decay from coarse_step down to step; off by
  /// default (the fixed-step rule is the reference behavior).
  bool coarse_to_fine = false;
  double coarse_step = 1e-3;
  int sampler_workers = 1;
};

enum class StopReason { sign_flip, max_iterations, insufficient_statistics };

const char* to_string(StopReason reason);

struct AdaptiveIteration {
  double epsilon;
  double delta_omega;
  std::int64_t n_accepted;
};

struct AdaptiveTrace {
  std::vector<AdaptiveIteration> iterations;
  double epsilon_final = 0.0;
  std::optional<double> tau_hat;  ///< present iff stop_reason == sign_flip
  std::int64_t total_photons_used = 0;
  StopReason stop_reason = StopReason::max_iterations;
  std::vector<std::string> warnings;
};

/// The feedback loop: measure the spectrum shift at the current angle, step
/// epsilon up when the shift is positive and down otherwise, stop once the
/// sign has flipped `confirmations` times in a row, then invert the
/// linearized shift at the final angle.
AdaptiveTrace run_adaptive(const TimeDelayScenario& s, const AdaptiveConfig& cfg,
                           const RandomStream& stream);

/// One-shot measurement at the scenario's fixed angle; the delay is
/// recovered by maximum likelihood over the accepted batch.
/// Throws InsufficientStatistics when nothing is accepted.
double run_swva(const TimeDelayScenario& s, std::int64_t n_input, const RandomStream& stream,
                std::pair<double, double> search = {0.0, 0.02}, int sampler_workers = 1);

/// Large-sample surrogate for the SWVA estimate: an efficient estimator's
/// law Normal(tau, 1 / sqrt(n * fisher_tau)).  fisher_tau is the per-photon
/// information about tau at the scenario's model (I_g / 4).
double run_swva_asymptotic(const TimeDelayScenario& s, std::int64_t n_input, double fisher_tau,
                           const RandomStream& stream);

/// Maximum-likelihood delay: argmax over tau of sum_i log P(omega_i; tau),
/// located on a 256-point grid and refined by golden section to 1e-8 fs.
double mle_estimate(const PhotonBatch& batch, const TimeDelayScenario& s,
                    std::pair<double, double> search);

}  // namespace awva
