#include <doctest.h>

#include <cmath>

#include "awva/adaptive.hpp"
#include "awva/errors.hpp"
#include "awva/fisher.hpp"
#include "awva/stats.hpp"
#include "test_util.hpp"

using namespace awva;
using testutil::default_scenario;

namespace {

AdaptiveConfig noise_free_config() {
  AdaptiveConfig cfg;
  cfg.backend = MeasurementBackend::noise_free;
  cfg.epsilon_init = 0.03;
  cfg.step = 1e-6;
  cfg.n_per_iteration = 1'000'000;
  cfg.max_iterations = 20'000;
  return cfg;
}

}  // namespace

TEST_CASE("noise-free descent converges onto the zero crossing") {
  TimeDelayScenario s = default_scenario();
  AdaptiveTrace trace = run_adaptive(s, noise_free_config(), RandomStream(1));
  REQUIRE(trace.stop_reason == StopReason::sign_flip);
  // crossing at omega0 tau = 0.0192, ~10800 steps from 0.03
  CHECK(std::fabs(trace.epsilon_final - 0.0192) <= 2e-6);
  REQUIRE(trace.tau_hat.has_value());
  CHECK(std::fabs(*trace.tau_hat - 0.008) / 0.008 <= 1e-3);
  CHECK(trace.iterations.size() > 10'000);
  CHECK(trace.iterations.size() < 12'000);
}

TEST_CASE("noise-free approach is monotone until the stop condition") {
  TimeDelayScenario s = default_scenario();
  AdaptiveTrace trace = run_adaptive(s, noise_free_config(), RandomStream(1));
  double target = 2.4 * 0.008;
  double prev = std::fabs(trace.iterations.front().epsilon - target);
  for (std::size_t k = 1; k + 1 < trace.iterations.size(); ++k) {
    double d = std::fabs(trace.iterations[k].epsilon - target);
    CHECK(d <= prev + 1e-15);
    prev = d;
  }
}

TEST_CASE("starting just below the crossing walks up onto it") {
  AdaptiveConfig cfg = noise_free_config();
  cfg.epsilon_init = 0.0191;
  AdaptiveTrace trace = run_adaptive(default_scenario(), cfg, RandomStream(1));
  REQUIRE(trace.stop_reason == StopReason::sign_flip);
  CHECK(std::fabs(trace.epsilon_final - 0.0192) <= 100e-6);
  CHECK(trace.iterations.front().delta_omega > 0.0);  // below the crossing: positive shift
}

TEST_CASE("iteration cap reports max-iterations without an estimate") {
  AdaptiveConfig cfg = noise_free_config();
  cfg.max_iterations = 10;
  AdaptiveTrace trace = run_adaptive(default_scenario(), cfg, RandomStream(1));
  CHECK(trace.stop_reason == StopReason::max_iterations);
  CHECK_FALSE(trace.tau_hat.has_value());
  CHECK(trace.iterations.size() == 10);
}

TEST_CASE("an empty exact iteration stops with insufficient statistics") {
  AdaptiveConfig cfg;
  cfg.backend = MeasurementBackend::exact;
  cfg.n_per_iteration = 100;  // P_d * n ~ 3e-3 at eps = 0.03
  cfg.max_iterations = 3;
  AdaptiveTrace trace = run_adaptive(default_scenario(), cfg, RandomStream(2));
  CHECK(trace.stop_reason == StopReason::insufficient_statistics);
  CHECK_FALSE(trace.tau_hat.has_value());
  CHECK(trace.iterations.back().n_accepted == 0);
}

TEST_CASE("photon budget accounting is exact") {
  AdaptiveConfig cfg = noise_free_config();
  cfg.max_iterations = 25;
  AdaptiveTrace trace = run_adaptive(default_scenario(), cfg, RandomStream(1));
  CHECK(trace.total_photons_used ==
        static_cast<std::int64_t>(trace.iterations.size()) * cfg.n_per_iteration);
}

TEST_CASE("identical seeds reproduce identical traces") {
  AdaptiveConfig cfg;
  cfg.backend = MeasurementBackend::asymptotic;
  cfg.n_per_iteration = 100'000'000;
  cfg.max_iterations = 15'000;
  AdaptiveTrace a = run_adaptive(default_scenario(), cfg, RandomStream(77, 3));
  AdaptiveTrace b = run_adaptive(default_scenario(), cfg, RandomStream(77, 3));
  REQUIRE(a.iterations.size() == b.iterations.size());
  for (std::size_t k = 0; k < a.iterations.size(); ++k) {
    CHECK(a.iterations[k].epsilon == b.iterations[k].epsilon);
    CHECK(a.iterations[k].delta_omega == b.iterations[k].delta_omega);
  }
  CHECK(a.epsilon_final == b.epsilon_final);

  AdaptiveTrace c = run_adaptive(default_scenario(), cfg, RandomStream(78, 3));
  CHECK(a.iterations.back().delta_omega != c.iterations.back().delta_omega);
}

TEST_CASE("asymptotic walk with a well-fed feedback converges near the crossing") {
  AdaptiveConfig cfg;
  cfg.backend = MeasurementBackend::asymptotic;
  cfg.n_per_iteration = 100'000'000;
  cfg.max_iterations = 30'000;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    AdaptiveTrace trace = run_adaptive(default_scenario(), cfg, RandomStream(seed));
    REQUIRE(trace.stop_reason == StopReason::sign_flip);
    CHECK(std::fabs(trace.epsilon_final - 0.0192) < 5e-4);
    REQUIRE(trace.tau_hat.has_value());
    CHECK(std::fabs(*trace.tau_hat - 0.008) < 5e-4);
  }
}

TEST_CASE("coarse-to-fine reaches the same neighborhood in far fewer steps") {
  AdaptiveConfig cfg = noise_free_config();
  cfg.coarse_to_fine = true;
  cfg.coarse_step = 1e-3;
  AdaptiveTrace trace = run_adaptive(default_scenario(), cfg, RandomStream(1));
  REQUIRE(trace.stop_reason == StopReason::sign_flip);
  CHECK(std::fabs(trace.epsilon_final - 0.0192) <= 2e-6);
  CHECK(trace.iterations.size() < 600);
}

TEST_CASE("confirmations delay the stop") {
  AdaptiveConfig cfg = noise_free_config();
  cfg.confirmations = 2;
  AdaptiveTrace trace = run_adaptive(default_scenario(), cfg, RandomStream(1));
  REQUIRE(trace.stop_reason == StopReason::sign_flip);
  // the deterministic walk alternates around the crossing, so the second
  // confirmation arrives one iteration later
  CHECK(std::fabs(trace.epsilon_final - 0.0192) <= 3e-6);
}

TEST_CASE("epsilon_init outside the customary window only warns") {
  AdaptiveConfig cfg = noise_free_config();
  cfg.epsilon_init = 0.2;
  cfg.max_iterations = 5;
  AdaptiveTrace trace = run_adaptive(default_scenario(), cfg, RandomStream(1));
  CHECK_FALSE(trace.warnings.empty());
}

TEST_CASE("exact backend runs with a live photon stream") {
  AdaptiveConfig cfg;
  cfg.backend = MeasurementBackend::exact;
  cfg.epsilon_init = 0.3;
  cfg.n_per_iteration = 20'000;  // ~390 accepted per iteration at eps = 0.3
  cfg.max_iterations = 5;
  AdaptiveTrace trace = run_adaptive(default_scenario(0.3), cfg, RandomStream(3));
  CHECK(trace.iterations.size() >= 1);
  for (const auto& it : trace.iterations) CHECK(it.n_accepted > 0);
  CHECK((trace.stop_reason == StopReason::max_iterations ||
         trace.stop_reason == StopReason::sign_flip));
}

TEST_CASE("swva estimate via maximum likelihood at the reference model") {
  // 100 seeds at N = 1e6 input photons (about 29 accepted each).  The
  // median error sits near 0.42 of the Cramer-Rao scale 1/sqrt(N I_tau)
  // (measured with an independent prototype); the spread over seeds keeps
  // it well inside [limit/3, 3*limit].
  TimeDelayScenario s = default_scenario();
  double i_tau = fisher_numeric(to_measurement_model(s)).value / 4.0;
  double limit = 1.0 / std::sqrt(1e6 * i_tau);
  std::vector<double> errors;
  RandomStream master(424242);
  for (int seed = 0; seed < 100; ++seed) {
    try {
      double tau_hat = run_swva(s, 1'000'000, master.derive(static_cast<std::uint64_t>(seed)),
                                {0.0, 0.02}, 2);
      errors.push_back(std::fabs(tau_hat - s.tau));
    } catch (const InsufficientStatistics&) {
      // ~1e-13 probability per trial; tolerated
    }
  }
  REQUIRE(errors.size() >= 99);
  double med = median(errors);
  MESSAGE("swva median error ", med, " vs CR scale ", limit);
  CHECK(med <= 3.0 * limit);
  CHECK(med >= limit / 3.0);
}

TEST_CASE("swva with nothing accepted raises InsufficientStatistics") {
  CHECK_THROWS_AS(run_swva(default_scenario(), 0, RandomStream(5)), InsufficientStatistics);
  // N = 100 at P_d ~ 2.9e-5: acceptance of any photon has probability ~3e-3
  CHECK_THROWS_AS(run_swva(default_scenario(), 100, RandomStream(5)), InsufficientStatistics);
}

TEST_CASE("asymptotic swva surrogate follows the efficient-estimator law") {
  TimeDelayScenario s = default_scenario();
  const double i_tau = 0.0233;
  std::vector<double> errors;
  RandomStream master(99);
  for (int t = 0; t < 400; ++t) {
    double tau_hat =
        run_swva_asymptotic(s, 1'000'000, i_tau, master.derive(static_cast<std::uint64_t>(t)));
    errors.push_back(std::fabs(tau_hat - s.tau));
  }
  double sigma = 1.0 / std::sqrt(1e6 * i_tau);
  CHECK(median(errors) == doctest::Approx(0.6745 * sigma).epsilon(0.15));
  CHECK_THROWS_AS(run_swva_asymptotic(s, 100, 0.0, RandomStream(1)), NonpositiveInformation);
}

TEST_CASE("mle consistency on a large batch") {
  TimeDelayScenario s = default_scenario(0.3);
  PhotonBatch batch = sample_photons(to_measurement_model(s), 400'000, RandomStream(31, 4), 2);
  REQUIRE(batch.n_accepted > 5000);
  double i_tau = fisher_numeric(to_measurement_model(s)).value / 4.0;
  double sigma = 1.0 / std::sqrt(400'000.0 * i_tau);
  double tau_hat = mle_estimate(batch, s, {0.0, 0.02});
  CHECK(std::fabs(tau_hat - s.tau) < 3.0 * sigma);
}

TEST_CASE("mle on data with no delay recovers tau near zero") {
  TimeDelayScenario truth(2.4, 0.055, 0.0, 0.3);
  TimeDelayScenario family = truth.with_tau(0.008);  // estimator family, wrong prior guess
  PhotonBatch batch = sample_photons(to_measurement_model(truth), 200'000, RandomStream(8), 2);
  REQUIRE(batch.n_accepted > 1000);
  double tau_hat = mle_estimate(batch, family, {0.0, 0.02});
  CHECK(tau_hat < 1e-3);
}

TEST_CASE("mle degenerate cases") {
  TimeDelayScenario s = default_scenario(0.3);
  PhotonBatch empty;
  CHECK_THROWS_AS(mle_estimate(empty, s, {0.0, 0.02}), InsufficientStatistics);

  // single photon at the acceptance zero of the true delay
  PhotonBatch one;
  one.accepted_x = {0.3 / 0.008};
  one.n_input = 1;
  one.n_accepted = 1;
  bool flagged = false;
  double tau_hat = 0.0;
  try {
    tau_hat = mle_estimate(one, s, {0.0, 0.02});
  } catch (const FlatLikelihood&) {
    flagged = true;
  }
  if (!flagged) {
    // degenerate data: the estimate runs to a search boundary
    CHECK((tau_hat < 2e-4 || tau_hat > 0.02 - 2e-4));
  }

  // an interval too short to vary the likelihood is flagged flat
  PhotonBatch batch = sample_photons(to_measurement_model(s), 100'000, RandomStream(9));
  REQUIRE(batch.n_accepted > 100);
  CHECK_THROWS_AS(mle_estimate(batch, s, {0.008, 0.008 + 1e-13}), FlatLikelihood);
}
