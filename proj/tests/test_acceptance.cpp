// Acceptance suite: one test per release criterion, each printing a
// PASS/FAIL line with the measured numbers.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include "awva/adaptive.hpp"
#include "awva/cli.hpp"
#include "awva/fisher.hpp"
#include "awva/quad.hpp"
#include "awva/stats.hpp"
#include "awva/timedelay.hpp"
#include "test_util.hpp"

using namespace awva;
using testutil::default_scenario;
namespace fs = std::filesystem;

namespace {

constexpr double kX2m = 5.763025;  // 2.4^2 + 0.055^2
const GaussianPointer kPointer{2.4, 0.055 * 0.055};

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[criterion %d] %-28s %s  (%s)\n", id, name, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

}  // namespace

TEST_CASE("criterion 1: optimal-information recovery") {
  WeakValue opt = optimal_imag_weak_value(kPointer, 0.004);
  MeasurementModel m = make_imaginary_weak_model(kPointer, 0.004, opt.im);
  double value = fisher_numeric(m).value;
  double rel = std::fabs(value - 4.0 * kX2m) / (4.0 * kX2m);
  bool ok = rel <= 1e-3;
  std::ostringstream d;
  d << "I = " << value << ", 4<x^2> = " << 4.0 * kX2m << ", rel dev " << rel;
  report(1, "optimal information", ok, d.str());
  CHECK(ok);
}

TEST_CASE("criterion 2: swva limit") {
  // x0 = 0 with |b g Delta| = 8.25e-4 < 1e-3
  GaussianPointer balanced(0.0, 0.055 * 0.055);
  MeasurementModel m = make_imaginary_weak_model(balanced, 3e-4, -50.0);
  double value = fisher_numeric(m).value;
  double target = 4.0 * 0.055 * 0.055;
  double rel = std::fabs(value - target) / target;
  bool ok = rel <= 1e-3;
  std::ostringstream d;
  d << "I = " << value << ", 4 Delta^2 = " << target << ", rel dev " << rel
    << ", |b g Delta| = " << 50.0 * 3e-4 * 0.055;
  report(2, "swva limit", ok, d.str());
  CHECK(ok);
}

TEST_CASE("criterion 3: qfi equivalence and cfi <= qfi") {
  const double thetas[5] = {0.1, 0.7, 1.2, std::numbers::pi / 2.0, 2.3};
  const double x0s[5] = {0.0, 0.6, 1.2, 1.8, 2.4};
  double worst_rel = 0.0;
  bool cfi_ok = true;
  for (double theta : thetas) {
    for (double x0 : x0s) {
      GaussianPointer p(x0, 0.055 * 0.055);
      double closed = qfi_closed(p, theta).value;
      double numeric = qfi_numeric(p, theta, 0.01).value;
      worst_rel = std::max(worst_rel, std::fabs(numeric - closed) / closed);

      TwoLevelState pre(theta, 0.0);
      TwoLevelState post(std::numbers::pi / 2.0, std::numbers::pi - 0.3);
      MeasurementModel m(p, pre, post, CouplingConfig{0.004});
      double cfi = fisher_numeric(m).value;
      if (cfi > closed + 1e-6) cfi_ok = false;
    }
  }
  bool ok = worst_rel <= 1e-6 && cfi_ok;
  std::ostringstream d;
  d << "worst |qfi_num/qfi_closed - 1| = " << worst_rel << ", cfi<=qfi "
    << (cfi_ok ? "holds" : "violated");
  report(3, "qfi equivalence", ok, d.str());
  CHECK(ok);
}

TEST_CASE("criterion 4: closed-form shift oracle on a 50x50 grid") {
  const int ne = 50, nt = 50;
  double worst = 0.0;
  int compared = 0;
  bool contour_ok = true;
  for (int ti = 0; ti < nt; ++ti) {
    double tau = 0.001 + (0.020 - 0.001) * ti / (nt - 1);
    double prev_eps = 0.0, prev_shift = 0.0;
    bool have_prev = false;
    double crossing_lo = 0.0, crossing_hi = 0.0;
    bool found = false;
    for (int ei = 0; ei < ne; ++ei) {
      double eps = 0.004 + (0.1 - 0.004) * ei / (ne - 1);
      TimeDelayScenario s(2.4, 0.055, tau, eps);
      AcceptedMoments mom = accepted_moments(s);
      double den = 2.0 * mom.p_d;
      double closed = mom.shift;
      if (den > 1e-6) {
        auto f = [&](double d) {
          double amp = std::sin(((d + 2.4) * tau - eps) / 2);
          return amp * amp * pointer_density(GaussianPointer(0.0, 0.055 * 0.055), d);
        };
        double m0 = integrate(f, -0.55, 0.55, {.rel_tol = 1e-11, .abs_scale = 1e-9});
        double m1 = integrate([&](double x) { return x * f(x); }, -0.55, 0.55,
                              {.rel_tol = 1e-11, .abs_scale = 1e-9 * 0.055});
        worst = std::max(worst, std::fabs(m1 / m0 - closed) / std::fabs(closed));
        ++compared;
      }
      if (have_prev && closed * prev_shift < 0.0) {
        crossing_lo = prev_eps;
        crossing_hi = eps;
        found = true;
      }
      prev_eps = eps;
      prev_shift = closed;
      have_prev = true;
    }
    double zero = 2.4 * tau;
    if (zero > 0.004 && zero < 0.1) {
      if (!found || zero < crossing_lo - 1e-12 || zero > crossing_hi + 1e-12) contour_ok = false;
    }
  }
  bool ok = worst <= 1e-8 && contour_ok && compared > 2000;
  std::ostringstream d;
  d << "worst rel dev " << worst << " over " << compared << " cells, zero contour "
    << (contour_ok ? "at eps = w0 tau" : "misplaced");
  report(4, "shift oracle", ok, d.str());
  CHECK(ok);
}

TEST_CASE("criterion 5: real-part optimality and nu(1+b^2) = 1") {
  const double nu_target = 2.2498312550624186e-4;  // sin^2(0.015)
  const int points = 41;
  std::vector<double> values(points);
  for (int i = 0; i < points; ++i) {
    double a = -0.5 + 1.0 * i / (points - 1);
    auto [pre, post] = matched_overlap_states(nu_target, a);
    MeasurementModel m(kPointer, pre, post, CouplingConfig{0.004});
    values[static_cast<std::size_t>(i)] = fisher_numeric(m).value;
  }
  std::size_t best =
      static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  bool peak_ok = best == points / 2;

  bool identity_ok = true;
  double worst_id = 0.0;
  for (int i = 1; i < 40; ++i) {
    double eps0 = 0.05 + (2.0 * std::numbers::pi - 0.1) * i / 40.0;
    if (std::fabs(eps0 - std::numbers::pi) < 0.02) continue;
    TwoLevelState pre(std::numbers::pi / 2.0, 0.0), post(std::numbers::pi / 2.0, eps0);
    double nu = overlap_probability(pre, post);
    WeakValue w = weak_value(pre, post);
    double dev = std::fabs(nu * (1.0 + w.norm2()) - 1.0);
    worst_id = std::max(worst_id, dev);
    if (dev > 1e-12) identity_ok = false;
  }
  bool ok = peak_ok && identity_ok;
  std::ostringstream d;
  d << "argmax index " << best << " (expect " << points / 2 << "), worst |nu(1+|A|^2)-1| = "
    << worst_id;
  report(5, "real-part optimality", ok, d.str());
  CHECK(ok);
}

TEST_CASE("criterion 6: deterministic adaptive convergence") {
  AdaptiveConfig cfg;
  cfg.backend = MeasurementBackend::noise_free;
  cfg.epsilon_init = 0.03;
  cfg.step = 1e-6;
  cfg.max_iterations = 20'000;
  AdaptiveTrace trace = run_adaptive(default_scenario(), cfg, RandomStream(1));
  bool converged = trace.stop_reason == StopReason::sign_flip &&
                   std::fabs(trace.epsilon_final - 0.0192) <= 2e-6 && trace.tau_hat.has_value();
  double rel = converged ? std::fabs(*trace.tau_hat - 0.008) / 0.008 : 1.0;
  bool ok = converged && rel <= 1e-3;
  std::ostringstream d;
  d << "eps_final = " << trace.epsilon_final << ", tau_hat rel err " << rel << ", "
    << trace.iterations.size() << " iterations";
  report(6, "adaptive convergence", ok, d.str());
  CHECK(ok);
}

TEST_CASE("criterion 7: error-vs-photon-number reproduction") {
  cli::RunConfig cfg;  // defaults: R = 100, N = {1e4, 1e5, 1e6}, asymptotic
  cfg.workers = 2;
  cli::SweepResult sweep = cli::run_sweep(cfg);

  bool ratio_ok = std::fabs(sweep.limit_ratio - 43.65) <= 0.01;
  bool below_swva = true, within3 = true;
  std::ostringstream d;
  d << "ratio " << sweep.limit_ratio << ";";
  for (const auto& point : sweep.points) {
    std::vector<double> ea, es;
    for (const auto& t : point.awva)
      if (t.status == "ok") ea.push_back(t.abs_err);
    for (const auto& t : point.swva)
      if (t.status == "ok") es.push_back(t.abs_err);
    double med_a = median(ea), med_s = median(es);
    if (!(med_a < med_s)) below_swva = false;
    if (!(med_a <= 3.0 * point.limit_awva_fs)) within3 = false;
    d << " N=" << point.n << ": awva " << med_a << " swva " << med_s << " limit "
      << point.limit_awva_fs << " (x" << med_a / point.limit_awva_fs << ");";
  }
  bool ok = ratio_ok && below_swva && within3;
  report(7, "error sweep", ok, d.str());
  CHECK(ratio_ok);
  CHECK(below_swva);
  CHECK(within3);
}

TEST_CASE("criterion 8: sampler fidelity") {
  // chi-square of accepted frequencies with >= 1e4 accepted photons
  MeasurementModel dense = to_measurement_model(default_scenario(0.3));
  PhotonBatch batch = sample_photons(dense, 600'000, RandomStream(31415), 2);
  bool count_ok = batch.n_accepted >= 10'000;
  auto gof = testutil::chi2_goodness_of_fit(batch.accepted_x, dense);
  bool chi_ok = gof.p_value > 0.01;

  // acceptance rate at the reference model over 1e7 input photons
  MeasurementModel thin = to_measurement_model(default_scenario(0.03));
  double pd = postselect_probability(thin);
  PhotonBatch big = sample_photons(thin, 10'000'000, RandomStream(2718), 2);
  double expect = pd * 1e7;
  double sigma = std::sqrt(pd * (1.0 - pd) * 1e7);
  double dev = std::fabs(static_cast<double>(big.n_accepted) - expect);
  bool rate_ok = dev <= 3.0 * sigma;

  bool ok = count_ok && chi_ok && rate_ok;
  std::ostringstream d;
  d << "chi2 p = " << gof.p_value << " (n_acc " << batch.n_accepted << "), rate dev " << dev
    << " vs 3 sigma " << 3.0 * sigma << " (accepted " << big.n_accepted << ", expect " << expect
    << ")";
  report(8, "sampler fidelity", ok, d.str());
  CHECK(ok);
}

TEST_CASE("criterion 9: byte-identical reruns") {
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  fs::path dir = fs::temp_directory_path() / "awva_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "cfg.json");
    out << R"({"sweep": {"n_values": [10000, 100000], "repetitions": 5}})";
  }
  std::string base = std::string(AWVA_CLI_PATH) + " sweep-n --config " +
                     (dir / "cfg.json").string() + " --seed 21 --out ";
  auto run = [&](const std::string& tail) {
    std::string cmd = base + tail + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  bool ran = run((dir / "a").string() + " --workers 1") == 0 &&
             run((dir / "b").string() + " --workers 1") == 0 &&
             run((dir / "c").string() + " --workers 4") == 0;
  bool identical = false;
  if (ran) {
    std::string a = slurp(dir / "a" / "sweep_n.csv");
    identical = a == slurp(dir / "b" / "sweep_n.csv") && a == slurp(dir / "c" / "sweep_n.csv") &&
                slurp(dir / "a" / "sweep_n_long.csv") == slurp(dir / "c" / "sweep_n_long.csv");
  }
  bool ok = ran && identical;
  report(9, "determinism", ok, ran ? (identical ? "all reruns byte-identical" : "byte mismatch")
                                   : "cli run failed");
  CHECK(ok);
}
