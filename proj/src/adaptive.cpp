#include "awva/adaptive.hpp"

#include <cmath>
#include <numbers>

#include "awva/errors.hpp"
#include "awva/stats.hpp"

namespace awva {
namespace {

constexpr std::uint64_t kIterationNoiseDomain = 2;

double checked_step(const AdaptiveConfig& cfg) {
  if (!(cfg.step > 0.0)) throw ConfigError("adaptive step must be positive");
  if (cfg.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (cfg.confirmations < 1) throw ConfigError("confirmations must be >= 1");
  if (cfg.n_per_iteration < 1) throw ConfigError("n_per_iteration must be >= 1");
  return cfg.step;
}

// Measured shift and accepted count for one iteration at angle eps.
struct Measurement {
  double delta_omega = 0.0;
  std::int64_t n_accepted = 0;
  bool empty = false;
};

Measurement measure_shift(const TimeDelayScenario& s, const AdaptiveConfig& cfg, int iteration,
                          const RandomStream& stream) {
  Measurement out;
  switch (cfg.backend) {
    case MeasurementBackend::noise_free: {
      AcceptedMoments mom = accepted_moments(s);
      out.delta_omega = mom.shift;
      out.n_accepted = std::llround(static_cast<double>(cfg.n_per_iteration) * mom.p_d);
      return out;
    }
    case MeasurementBackend::asymptotic: {
      AcceptedMoments mom = accepted_moments(s);
      double sigma =
          std::sqrt(mom.variance / (static_cast<double>(cfg.n_per_iteration) * mom.p_d));
      double z = stream.normal(kIterationNoiseDomain, static_cast<std::uint64_t>(iteration));
      out.delta_omega = mom.shift + sigma * z;
      out.n_accepted = std::llround(static_cast<double>(cfg.n_per_iteration) * mom.p_d);
      return out;
    }
    case MeasurementBackend::exact: {
      PhotonBatch batch =
          sample_photons(to_measurement_model(s), cfg.n_per_iteration,
                         stream.derive(static_cast<std::uint64_t>(iteration)), cfg.sampler_workers);
      if (batch.n_accepted == 0) {
        out.empty = true;
        return out;
      }
      out.n_accepted = batch.n_accepted;
      out.delta_omega = mean(batch.accepted_x) - s.omega0;
      return out;
    }
  }
  throw ConfigError("unknown measurement backend");
}

}  // namespace

const char* to_string(MeasurementBackend backend) {
  switch (backend) {
    case MeasurementBackend::exact: return "exact";
    case MeasurementBackend::asymptotic: return "asymptotic";
    case MeasurementBackend::noise_free: return "noise-free";
  }
  return "unknown";
}

MeasurementBackend backend_from_string(const std::string& name) {
  if (name == "exact") return MeasurementBackend::exact;
  if (name == "asymptotic") return MeasurementBackend::asymptotic;
  if (name == "noise-free" || name == "noise_free") return MeasurementBackend::noise_free;
  throw ConfigError("unknown measurement model: " + name);
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::sign_flip: return "sign-flip";
    case StopReason::max_iterations: return "max-iterations";
    case StopReason::insufficient_statistics: return "insufficient-statistics";
  }
  return "unknown";
}

AdaptiveTrace run_adaptive(const TimeDelayScenario& s, const AdaptiveConfig& cfg,
                           const RandomStream& stream) {
  const double fine_step = checked_step(cfg);
  AdaptiveTrace trace;
  if (cfg.epsilon_init < 0.001 || cfg.epsilon_init > 0.1) {
    trace.warnings.push_back("epsilon_init outside the customary range [0.001, 0.1]");
  }

  double eps = cfg.epsilon_init;
  double step = cfg.coarse_to_fine ? std::max(cfg.coarse_step, fine_step) : fine_step;
  int prev_sign = 0;
  int streak = 0;

  for (int k = 0; k < cfg.max_iterations; ++k) {
    TimeDelayScenario current = s.with_epsilon(eps);
    Measurement meas = measure_shift(current, cfg, k, stream);
    trace.total_photons_used += cfg.n_per_iteration;
    if (meas.empty) {
      trace.iterations.push_back({eps, 0.0, 0});
      trace.epsilon_final = eps;
      trace.stop_reason = StopReason::insufficient_statistics;
      return trace;
    }
    trace.iterations.push_back({eps, meas.delta_omega, meas.n_accepted});

    const int sign = meas.delta_omega > 0.0 ? 1 : -1;
    if (prev_sign != 0 && sign != prev_sign) {
      if (step > fine_step) {
        // coarse phase: a flip means the crossing was overstepped; contract
        step = std::max(fine_step, step / 4.0);
        streak = 0;
      } else {
        ++streak;
        if (streak >= cfg.confirmations) {
          trace.epsilon_final = eps;
          trace.stop_reason = StopReason::sign_flip;
          trace.tau_hat = estimate_tau(eps, meas.delta_omega, s.omega0);
          return trace;
        }
      }
    } else {
      streak = 0;
    }
    prev_sign = sign;

    double next = sign > 0 ? eps + step : eps - step;
    if (next <= 0.0 || next >= std::numbers::pi) {
      trace.warnings.push_back("post-selection angle clamped at domain boundary");
      next = std::min(std::max(next, 1e-9), std::numbers::pi - 1e-9);
    }
    eps = next;
  }

  trace.epsilon_final = trace.iterations.empty() ? eps : trace.iterations.back().epsilon;
  trace.stop_reason = StopReason::max_iterations;
  return trace;
}

double run_swva(const TimeDelayScenario& s, std::int64_t n_input, const RandomStream& stream,
                std::pair<double, double> search, int sampler_workers) {
  if (n_input < 1) throw InsufficientStatistics("swva run needs at least one input photon");
  PhotonBatch batch = sample_photons(to_measurement_model(s), n_input, stream, sampler_workers);
  if (batch.n_accepted == 0) {
    throw InsufficientStatistics("swva run accepted no photons");
  }
  return mle_estimate(batch, s, search);
}

double run_swva_asymptotic(const TimeDelayScenario& s, std::int64_t n_input, double fisher_tau,
                           const RandomStream& stream) {
  if (n_input < 1) throw InsufficientStatistics("swva run needs at least one input photon");
  if (!(fisher_tau > 0.0)) throw NonpositiveInformation("swva surrogate needs positive information");
  double z = stream.normal(kIterationNoiseDomain, 0);
  return s.tau + z / std::sqrt(static_cast<double>(n_input) * fisher_tau);
}

namespace {

// Log-likelihood of the accepted frequencies as a function of tau; the
// tau-free log P0 term is dropped.  Uses the acceptance kernel
// nu * zeta = sin^2((omega tau - eps)/2) and the closed-form normalizer.
double log_likelihood(const std::vector<double>& omegas, const TimeDelayScenario& s, double tau) {
  TimeDelayScenario cand = s.with_tau(tau);
  const double pd = accepted_moments(cand).p_d;
  double ll = -static_cast<double>(omegas.size()) * std::log(pd);
  for (double w : omegas) {
    double amp = std::sin(0.5 * (w * tau - s.epsilon));
    double a2 = amp * amp;
    ll += std::log(a2 > 1e-300 ? a2 : 1e-300);
  }
  return ll;
}

}  // namespace

double mle_estimate(const PhotonBatch& batch, const TimeDelayScenario& s,
                    std::pair<double, double> search) {
  if (batch.n_accepted < 1) throw InsufficientStatistics("mle over an empty batch");
  auto [lo, hi] = search;
  if (!(lo < hi)) throw ConfigError("mle search interval is empty");

  constexpr int kGrid = 256;
  double best_t = lo, best_ll = -1e308, min_ll = 1e308;
  for (int i = 0; i <= kGrid; ++i) {
    double t = lo + (hi - lo) * i / kGrid;
    double ll = log_likelihood(batch.accepted_x, s, t);
    if (ll > best_ll) {
      best_ll = ll;
      best_t = t;
    }
    if (ll < min_ll) min_ll = ll;
  }
  if (best_ll - min_ll < 1e-12) {
    throw FlatLikelihood("log-likelihood flat over the search grid");
  }

  const double h = (hi - lo) / kGrid;
  double a = std::max(lo, best_t - h);
  double b = std::min(hi, best_t + h);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = log_likelihood(batch.accepted_x, s, c);
  double fd = log_likelihood(batch.accepted_x, s, d);
  while (b - a > 1e-8) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = log_likelihood(batch.accepted_x, s, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = log_likelihood(batch.accepted_x, s, d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace awva
