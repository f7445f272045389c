#include "awva/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "awva/errors.hpp"
#include "awva/fisher.hpp"
#include "awva/stats.hpp"
#include "awva/units.hpp"

namespace awva::cli {
namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kFinalMeasurementNoiseDomain = 3;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void parallel_for(int workers, std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load()) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    int nw = std::min<int>(workers, static_cast<int>(n));
    pool.reserve(static_cast<std::size_t>(nw));
    for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["scenario"] = {{"omega0_thz", cfg.scenario.omega0_thz},
                   {"delta_thz", cfg.scenario.delta_thz},
                   {"tau_as", cfg.scenario.tau_as},
                   {"epsilon", cfg.scenario.epsilon}};
  j["adaptive"] = {{"epsilon_init", cfg.adaptive.epsilon_init},
                   {"step", cfg.adaptive.step},
                   {"n_per_iteration", cfg.adaptive.n_per_iteration},
                   {"max_iterations", cfg.adaptive.max_iterations},
                   {"confirmations", cfg.adaptive.confirmations},
                   {"measurement_model", to_string(cfg.adaptive.backend)},
                   {"coarse_to_fine", cfg.adaptive.coarse_to_fine},
                   {"coarse_step", cfg.adaptive.coarse_step}};
  j["sweep"] = {{"n_values", cfg.sweep.n_values},
                {"repetitions", cfg.sweep.repetitions},
                {"measurement_model", to_string(cfg.sweep.measurement)}};
  j["fisher_surface"] = {{"g_min", cfg.fisher_surface.g_min}, {"g_max", cfg.fisher_surface.g_max},
                         {"g_steps", cfg.fisher_surface.g_steps}, {"b_min", cfg.fisher_surface.b_min},
                         {"b_max", cfg.fisher_surface.b_max}, {"b_steps", cfg.fisher_surface.b_steps}};
  j["shift_surface"] = {{"eps_min", cfg.shift_surface.eps_min},
                        {"eps_max", cfg.shift_surface.eps_max},
                        {"eps_steps", cfg.shift_surface.eps_steps},
                        {"tau_min_as", cfg.shift_surface.tau_min_as},
                        {"tau_max_as", cfg.shift_surface.tau_max_as},
                        {"tau_steps", cfg.shift_surface.tau_steps}};
  j["master_seed"] = cfg.master_seed;
  j["output_dir"] = cfg.output_dir;
  j["workers"] = cfg.workers;
  return j;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw IoFailure("cannot create output directory " + cfg.output_dir);
  fs::path path = fs::path(cfg.output_dir) / name;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoFailure("cannot open " + path.string());
  return out;
}

void write_header(std::ofstream& out, const RunConfig& cfg, const std::string& command,
                  const std::vector<std::pair<std::string, std::string>>& extra) {
  TimeDelayScenario s = scenario_internal(cfg);
  out << "# awva " << kVersion << "\n";
  out << "# command = " << command << "\n";
  char hash[32];
  std::snprintf(hash, sizeof(hash), "0x%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  out << "# config_hash = " << hash << "\n";
  out << "# master_seed = " << cfg.master_seed << "\n";
  out << "# omega0_radfs = " << g17(s.omega0) << "\n";
  out << "# delta_radfs = " << g17(s.delta) << "\n";
  out << "# tau0_fs = " << g17(s.tau) << "\n";
  out << "# epsilon = " << g17(s.epsilon) << "\n";
  for (const auto& [k, v] : extra) out << "# " << k << " = " << v << "\n";
}

void write_summary(const RunConfig& cfg, const std::string& command, json results) {
  json j;
  j["tool"] = std::string("awva ") + kVersion;
  j["command"] = command;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "0x%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  j["config_hash"] = hash;
  j["master_seed"] = cfg.master_seed;
  j["config"] = config_to_json(cfg);
  j["results"] = std::move(results);
  std::ofstream out = open_output(cfg, command + "_summary.json");
  out << j.dump(2) << "\n";
  if (!out) throw IoFailure("failed writing summary for " + command);
}

}  // namespace

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (j.contains("scenario")) {
    const json& s = j["scenario"];
    cfg.scenario.omega0_thz = get_or(s, "omega0_thz", cfg.scenario.omega0_thz);
    cfg.scenario.delta_thz = get_or(s, "delta_thz", cfg.scenario.delta_thz);
    cfg.scenario.tau_as = get_or(s, "tau_as", cfg.scenario.tau_as);
    cfg.scenario.epsilon = get_or(s, "epsilon", cfg.scenario.epsilon);
  }
  if (j.contains("adaptive")) {
    const json& a = j["adaptive"];
    cfg.adaptive.epsilon_init = get_or(a, "epsilon_init", cfg.adaptive.epsilon_init);
    cfg.adaptive.step = get_or(a, "step", cfg.adaptive.step);
    cfg.adaptive.n_per_iteration = get_or(a, "n_per_iteration", cfg.adaptive.n_per_iteration);
    cfg.adaptive.max_iterations = get_or(a, "max_iterations", cfg.adaptive.max_iterations);
    cfg.adaptive.confirmations = get_or(a, "confirmations", cfg.adaptive.confirmations);
    cfg.adaptive.coarse_to_fine = get_or(a, "coarse_to_fine", cfg.adaptive.coarse_to_fine);
    cfg.adaptive.coarse_step = get_or(a, "coarse_step", cfg.adaptive.coarse_step);
    if (a.contains("measurement_model")) {
      cfg.adaptive.backend = backend_from_string(a.at("measurement_model").get<std::string>());
    }
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    cfg.sweep.n_values = get_or(s, "n_values", cfg.sweep.n_values);
    cfg.sweep.repetitions = get_or(s, "repetitions", cfg.sweep.repetitions);
    if (s.contains("measurement_model")) {
      cfg.sweep.measurement = backend_from_string(s.at("measurement_model").get<std::string>());
    }
  }
  if (j.contains("fisher_surface")) {
    const json& f = j["fisher_surface"];
    cfg.fisher_surface.g_min = get_or(f, "g_min", cfg.fisher_surface.g_min);
    cfg.fisher_surface.g_max = get_or(f, "g_max", cfg.fisher_surface.g_max);
    cfg.fisher_surface.g_steps = get_or(f, "g_steps", cfg.fisher_surface.g_steps);
    cfg.fisher_surface.b_min = get_or(f, "b_min", cfg.fisher_surface.b_min);
    cfg.fisher_surface.b_max = get_or(f, "b_max", cfg.fisher_surface.b_max);
    cfg.fisher_surface.b_steps = get_or(f, "b_steps", cfg.fisher_surface.b_steps);
  }
  if (j.contains("shift_surface")) {
    const json& f = j["shift_surface"];
    cfg.shift_surface.eps_min = get_or(f, "eps_min", cfg.shift_surface.eps_min);
    cfg.shift_surface.eps_max = get_or(f, "eps_max", cfg.shift_surface.eps_max);
    cfg.shift_surface.eps_steps = get_or(f, "eps_steps", cfg.shift_surface.eps_steps);
    cfg.shift_surface.tau_min_as = get_or(f, "tau_min_as", cfg.shift_surface.tau_min_as);
    cfg.shift_surface.tau_max_as = get_or(f, "tau_max_as", cfg.shift_surface.tau_max_as);
    cfg.shift_surface.tau_steps = get_or(f, "tau_steps", cfg.shift_surface.tau_steps);
  }
  cfg.master_seed = get_or(j, "master_seed", cfg.master_seed);
  cfg.output_dir = get_or(j, "output_dir", cfg.output_dir);
  cfg.workers = get_or(j, "workers", cfg.workers);

  if (cfg.sweep.repetitions < 1) throw ConfigError("sweep.repetitions must be >= 1");
  if (cfg.sweep.n_values.empty()) throw ConfigError("sweep.n_values must be nonempty");
  for (std::size_t i = 1; i < cfg.sweep.n_values.size(); ++i) {
    if (cfg.sweep.n_values[i] <= cfg.sweep.n_values[i - 1]) {
      throw ConfigError("sweep.n_values must be strictly increasing");
    }
  }
  return cfg;
}

TimeDelayScenario scenario_internal(const RunConfig& cfg) {
  return TimeDelayScenario(units::thz_to_radfs(cfg.scenario.omega0_thz),
                           units::thz_to_radfs(cfg.scenario.delta_thz),
                           units::as_to_fs(cfg.scenario.tau_as), cfg.scenario.epsilon);
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::string text = config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

TrialOutcome awva_trial(const TimeDelayScenario& scen, const RunConfig& cfg, std::int64_t n,
                        const RandomStream& stream) {
  TrialOutcome out;
  AdaptiveConfig acfg = cfg.adaptive;
  acfg.backend = cfg.sweep.measurement;
  AdaptiveTrace trace = run_adaptive(scen, acfg, stream.derive(0));
  out.total_photons = trace.total_photons_used + n;
  if (trace.stop_reason != StopReason::sign_flip) {
    out.status = to_string(trace.stop_reason);
    return out;
  }
  // One measurement with the sweep's photon budget at the adapted angle.
  TimeDelayScenario final_scen = scen.with_epsilon(trace.epsilon_final);
  double delta_omega = 0.0;
  try {
    switch (cfg.sweep.measurement) {
      case MeasurementBackend::exact: {
        PhotonBatch batch =
            sample_photons(to_measurement_model(final_scen), n, stream.derive(1));
        if (batch.n_accepted == 0) {
          out.status = "insufficient-statistics";
          return out;
        }
        delta_omega = mean(batch.accepted_x) - scen.omega0;
        break;
      }
      case MeasurementBackend::asymptotic: {
        AcceptedMoments mom = accepted_moments(final_scen);
        double sigma = std::sqrt(mom.variance / (static_cast<double>(n) * mom.p_d));
        delta_omega = mom.shift + sigma * stream.normal(kFinalMeasurementNoiseDomain, 0);
        break;
      }
      case MeasurementBackend::noise_free: {
        delta_omega = accepted_moments(final_scen).shift;
        break;
      }
    }
    out.tau_hat = estimate_tau(trace.epsilon_final, delta_omega, scen.omega0);
  } catch (const Error& e) {
    out.status = e.what();
    return out;
  }
  out.abs_err = std::fabs(out.tau_hat - scen.tau);
  return out;
}

TrialOutcome swva_trial(const TimeDelayScenario& scen, const RunConfig& cfg, std::int64_t n,
                        double fisher_tau, const RandomStream& stream) {
  TrialOutcome out;
  out.total_photons = n;
  try {
    switch (cfg.sweep.measurement) {
      case MeasurementBackend::exact:
        out.tau_hat = run_swva(scen, n, stream);
        break;
      case MeasurementBackend::asymptotic:
        out.tau_hat = run_swva_asymptotic(scen, n, fisher_tau, stream);
        break;
      case MeasurementBackend::noise_free:
        out.tau_hat = scen.tau;
        break;
    }
  } catch (const Error& e) {
    out.status = e.what();
    return out;
  }
  out.abs_err = std::fabs(out.tau_hat - scen.tau);
  return out;
}

std::vector<double> ok_errors(const std::vector<TrialOutcome>& trials) {
  std::vector<double> v;
  for (const auto& t : trials) {
    if (t.status == "ok") v.push_back(t.abs_err);
  }
  return v;
}

}  // namespace

SweepResult run_sweep(const RunConfig& cfg) {
  const TimeDelayScenario scen = scenario_internal(cfg);
  SweepResult result;

  // Per-photon information about tau of the fixed-angle measurement
  // (I_tau = I_g / 4 since g = tau/2), used by the surrogate estimator and
  // reported alongside the nominal limits.
  result.fisher_tau_swva_model = fisher_numeric(to_measurement_model(scen)).value / 4.0;

  const double x2m = scen.second_moment();
  result.limit_ratio = std::sqrt(x2m / (scen.delta * scen.delta));

  const int reps = cfg.sweep.repetitions;
  result.points.resize(cfg.sweep.n_values.size());
  for (std::size_t p = 0; p < cfg.sweep.n_values.size(); ++p) {
    SweepPoint& point = result.points[p];
    point.n = cfg.sweep.n_values[p];
    point.awva.resize(reps);
    point.swva.resize(reps);
    double nd = static_cast<double>(point.n);
    point.limit_awva_fs = 1.0 / std::sqrt(nd * x2m);
    point.limit_swva_fs = 1.0 / std::sqrt(nd * scen.delta * scen.delta);
  }

  RandomStream master(cfg.master_seed);
  const std::size_t n_points = cfg.sweep.n_values.size();
  const std::size_t total = n_points * 2 * static_cast<std::size_t>(reps);
  parallel_for(cfg.workers, total, [&](std::size_t flat) {
    std::size_t p = flat / (2 * static_cast<std::size_t>(reps));
    std::size_t rest = flat % (2 * static_cast<std::size_t>(reps));
    std::size_t scheme = rest / static_cast<std::size_t>(reps);
    std::size_t trial = rest % static_cast<std::size_t>(reps);
    std::uint64_t id = (static_cast<std::uint64_t>(p) << 24) |
                       (static_cast<std::uint64_t>(scheme) << 16) | trial;
    RandomStream st = master.derive(id);
    SweepPoint& point = result.points[p];
    if (scheme == 0) {
      point.awva[trial] = awva_trial(scen, cfg, point.n, st);
    } else {
      point.swva[trial] = swva_trial(scen, cfg, point.n, result.fisher_tau_swva_model, st);
    }
  });
  return result;
}

int cmd_sweep_n(const RunConfig& cfg) {
  SweepResult sweep = run_sweep(cfg);

  std::ofstream out = open_output(cfg, "sweep_n.csv");
  write_header(out, cfg, "sweep-n",
               {{"measurement_model", to_string(cfg.sweep.measurement)},
                {"repetitions", std::to_string(cfg.sweep.repetitions)},
                {"adapt_photons_per_iteration", std::to_string(cfg.adaptive.n_per_iteration)},
                {"limit_ratio_swva_over_awva", g17(sweep.limit_ratio)},
                {"fisher_tau_swva_model", g17(sweep.fisher_tau_swva_model)}});
  out << "N,awva_err_mean,awva_err_median,awva_err_rms,swva_err_mean,swva_err_median,"
         "swva_err_rms,limit_awva_fs,limit_swva_fs,awva_failures,swva_failures\n";
  for (const auto& point : sweep.points) {
    std::vector<double> ea = ok_errors(point.awva);
    std::vector<double> es = ok_errors(point.swva);
    out << point.n << ',' << g17(mean(ea)) << ',' << g17(median(ea)) << ',' << g17(rms(ea)) << ','
        << g17(mean(es)) << ',' << g17(median(es)) << ',' << g17(rms(es)) << ','
        << g17(point.limit_awva_fs) << ',' << g17(point.limit_swva_fs) << ','
        << (point.awva.size() - ea.size()) << ',' << (point.swva.size() - es.size()) << '\n';
  }
  if (!out) throw IoFailure("failed writing sweep_n.csv");

  std::ofstream longout = open_output(cfg, "sweep_n_long.csv");
  write_header(longout, cfg, "sweep-n", {{"format", "long"}});
  longout << "N,scheme,trial,status,tau_hat_fs,abs_err_fs,total_photons\n";
  for (const auto& point : sweep.points) {
    for (int scheme = 0; scheme < 2; ++scheme) {
      const auto& trials = scheme == 0 ? point.awva : point.swva;
      for (std::size_t r = 0; r < trials.size(); ++r) {
        const TrialOutcome& t = trials[r];
        longout << point.n << ',' << (scheme == 0 ? "awva" : "swva") << ',' << r << ',' << t.status
                << ',' << g17(t.tau_hat) << ',' << g17(t.abs_err) << ',' << t.total_photons
                << '\n';
      }
    }
  }
  if (!longout) throw IoFailure("failed writing sweep_n_long.csv");

  json res;
  res["limit_ratio_swva_over_awva"] = sweep.limit_ratio;
  res["fisher_tau_swva_model"] = sweep.fisher_tau_swva_model;
  json points = json::array();
  for (const auto& point : sweep.points) {
    std::vector<double> ea = ok_errors(point.awva);
    std::vector<double> es = ok_errors(point.swva);
    points.push_back({{"N", point.n},
                      {"awva_err_median", median(ea)},
                      {"swva_err_median", median(es)},
                      {"limit_awva_fs", point.limit_awva_fs},
                      {"limit_swva_fs", point.limit_swva_fs},
                      {"awva_failures", point.awva.size() - ea.size()},
                      {"swva_failures", point.swva.size() - es.size()}});
  }
  res["points"] = std::move(points);
  write_summary(cfg, "sweep_n", std::move(res));
  return 0;
}

int cmd_fisher_surface(const RunConfig& cfg) {
  const TimeDelayScenario scen = scenario_internal(cfg);
  const GaussianPointer pointer(scen.omega0, scen.delta * scen.delta);
  const FisherSurfaceConfig& fs = cfg.fisher_surface;
  if (fs.g_steps < 1 || fs.b_steps < 1) throw ConfigError("fisher_surface grid must be nonempty");

  std::vector<double> gs(fs.g_steps), bs(fs.b_steps);
  for (int i = 0; i < fs.g_steps; ++i) {
    gs[i] = fs.g_steps == 1 ? fs.g_min
                            : fs.g_min + (fs.g_max - fs.g_min) * i / (fs.g_steps - 1);
  }
  for (int i = 0; i < fs.b_steps; ++i) {
    bs[i] = fs.b_steps == 1 ? fs.b_min
                            : fs.b_min + (fs.b_max - fs.b_min) * i / (fs.b_steps - 1);
  }

  std::vector<double> numeric(gs.size() * bs.size());
  std::vector<double> closed(gs.size() * bs.size());
  parallel_for(cfg.workers, numeric.size(), [&](std::size_t flat) {
    std::size_t gi = flat / bs.size();
    std::size_t bi = flat % bs.size();
    MeasurementModel m = make_imaginary_weak_model(pointer, gs[gi], bs[bi]);
    numeric[flat] = fisher_numeric(m).value;
    closed[flat] = fisher_closed_imag(pointer, gs[gi], bs[bi]).value;
  });

  // Tracked-optimum column: the numeric information with b held at the
  // per-g optimum, flat at 4<x^2>_0 across the grid.
  std::vector<double> tracked(gs.size());
  parallel_for(cfg.workers, gs.size(), [&](std::size_t gi) {
    WeakValue opt = optimal_imag_weak_value(pointer, gs[gi]);
    tracked[gi] = fisher_numeric(make_imaginary_weak_model(pointer, gs[gi], opt.im)).value;
  });

  std::ofstream out = open_output(cfg, "fisher_surface.csv");
  write_header(out, cfg, "fisher-surface",
               {{"x0_radfs", g17(pointer.mean)}, {"qfi_max", g17(4.0 * pointer.second_moment())}});
  out << "g,b,I_numeric,I_closed\n";
  for (std::size_t gi = 0; gi < gs.size(); ++gi) {
    for (std::size_t bi = 0; bi < bs.size(); ++bi) {
      out << g17(gs[gi]) << ',' << g17(bs[bi]) << ',' << g17(numeric[gi * bs.size() + bi]) << ','
          << g17(closed[gi * bs.size() + bi]) << '\n';
    }
  }
  if (!out) throw IoFailure("failed writing fisher_surface.csv");

  std::ofstream per_g = open_output(cfg, "fisher_surface_per_g.csv");
  write_header(per_g, cfg, "fisher-surface", {{"format", "per-g"}});
  per_g << "g,b_argmax,I_max_numeric,b_opt,I_tracked_numeric\n";
  json res;
  json rows = json::array();
  for (std::size_t gi = 0; gi < gs.size(); ++gi) {
    std::size_t best = 0;
    for (std::size_t bi = 1; bi < bs.size(); ++bi) {
      if (numeric[gi * bs.size() + bi] > numeric[gi * bs.size() + best]) best = bi;
    }
    WeakValue opt = optimal_imag_weak_value(pointer, gs[gi]);
    per_g << g17(gs[gi]) << ',' << g17(bs[best]) << ',' << g17(numeric[gi * bs.size() + best])
          << ',' << g17(opt.im) << ',' << g17(tracked[gi]) << '\n';
    rows.push_back({{"g", gs[gi]},
                    {"b_argmax", bs[best]},
                    {"I_max_numeric", numeric[gi * bs.size() + best]},
                    {"b_opt", opt.im},
                    {"I_tracked_numeric", tracked[gi]}});
  }
  if (!per_g) throw IoFailure("failed writing fisher_surface_per_g.csv");
  res["per_g"] = std::move(rows);
  res["qfi_max"] = 4.0 * pointer.second_moment();
  write_summary(cfg, "fisher_surface", std::move(res));
  return 0;
}

int cmd_shift_surface(const RunConfig& cfg) {
  const TimeDelayScenario scen = scenario_internal(cfg);
  const ShiftSurfaceConfig& sc = cfg.shift_surface;
  if (sc.eps_steps < 1 || sc.tau_steps < 1) throw ConfigError("shift_surface grid must be nonempty");

  std::ofstream out = open_output(cfg, "shift_surface.csv");
  write_header(out, cfg, "shift-surface", {});
  out << "epsilon,tau_fs,delta_omega\n";
  json zero_rows = json::array();
  for (int ti = 0; ti < sc.tau_steps; ++ti) {
    double tau_as = sc.tau_steps == 1
                        ? sc.tau_min_as
                        : sc.tau_min_as + (sc.tau_max_as - sc.tau_min_as) * ti / (sc.tau_steps - 1);
    double tau = units::as_to_fs(tau_as);
    double prev_eps = 0.0, prev_shift = 0.0;
    double zero_eps = std::numeric_limits<double>::quiet_NaN();
    for (int ei = 0; ei < sc.eps_steps; ++ei) {
      double eps = sc.eps_steps == 1
                       ? sc.eps_min
                       : sc.eps_min + (sc.eps_max - sc.eps_min) * ei / (sc.eps_steps - 1);
      double shift = spectrum_shift(scen.with_tau(tau).with_epsilon(eps));
      out << g17(eps) << ',' << g17(tau) << ',' << g17(shift) << '\n';
      if (ei > 0 && shift * prev_shift < 0.0) zero_eps = 0.5 * (prev_eps + eps);
      prev_eps = eps;
      prev_shift = shift;
    }
    zero_rows.push_back({{"tau_fs", tau},
                         {"zero_epsilon", zero_eps},
                         {"omega0_tau", scen.omega0 * tau}});
  }
  if (!out) throw IoFailure("failed writing shift_surface.csv");

  json res;
  res["zero_contour"] = std::move(zero_rows);
  write_summary(cfg, "shift_surface", std::move(res));
  return 0;
}

int cmd_adaptive(const RunConfig& cfg) {
  const TimeDelayScenario scen = scenario_internal(cfg);
  RandomStream master(cfg.master_seed);
  AdaptiveConfig acfg = cfg.adaptive;
  acfg.sampler_workers = cfg.workers;
  AdaptiveTrace trace = run_adaptive(scen, acfg, master.derive(0));

  std::ofstream out = open_output(cfg, "adaptive_trace.csv");
  write_header(out, cfg, "adaptive",
               {{"measurement_model", to_string(acfg.backend)},
                {"epsilon_init", g17(acfg.epsilon_init)},
                {"step", g17(acfg.step)},
                {"n_per_iteration", std::to_string(acfg.n_per_iteration)}});
  out << "k,epsilon,delta_omega,n_accepted\n";
  for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
    const AdaptiveIteration& it = trace.iterations[k];
    out << k << ',' << g17(it.epsilon) << ',' << g17(it.delta_omega) << ',' << it.n_accepted
        << '\n';
  }
  if (!out) throw IoFailure("failed writing adaptive_trace.csv");

  json res;
  res["stop_reason"] = to_string(trace.stop_reason);
  res["epsilon_final"] = trace.epsilon_final;
  res["iterations"] = trace.iterations.size();
  res["total_photons_used"] = trace.total_photons_used;
  res["epsilon_opt_theoretical"] = epsilon_opt(scen);
  res["epsilon_zero_crossing"] = scen.omega0 * scen.tau;
  if (trace.tau_hat.has_value()) {
    res["tau_hat_fs"] = *trace.tau_hat;
    res["abs_err_fs"] = std::fabs(*trace.tau_hat - scen.tau);
  } else {
    res["tau_hat_fs"] = nullptr;
  }
  res["warnings"] = trace.warnings;
  write_summary(cfg, "adaptive", std::move(res));
  return 0;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"adaptive weak-value amplification simulation toolkit"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string measurement_model;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int repetitions = 0;
  int workers = -1;
  bool noise_free = false;

  app.add_option("--config", config_path, "JSON configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (64-bit)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--repetitions", repetitions, "trials per sweep point");
  app.add_option("--workers", workers, "worker threads (0 = hardware)");
  app.add_option("--measurement-model", measurement_model,
                 "exact | asymptotic | noise-free");
  app.add_flag("--noise-free", noise_free, "use the deterministic closed-form measurement");

  CLI::App* c_fisher = app.add_subcommand("fisher-surface", "Fisher information over (g, b)");
  CLI::App* c_shift = app.add_subcommand("shift-surface", "spectrum shift over (epsilon, tau)");
  CLI::App* c_sweep = app.add_subcommand("sweep-n", "error vs photon number, both schemes");
  CLI::App* c_adapt = app.add_subcommand("adaptive", "single adaptive feedback run");

  try {
    app.parse(argc, argv);
    seed_set = seed_opt->count() > 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (seed_set) cfg.master_seed = seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (repetitions > 0) cfg.sweep.repetitions = repetitions;
    if (workers >= 0) cfg.workers = workers;
    if (!measurement_model.empty()) {
      MeasurementBackend backend = backend_from_string(measurement_model);
      cfg.sweep.measurement = backend;
      cfg.adaptive.backend = backend;
    }
    if (noise_free) {
      cfg.sweep.measurement = MeasurementBackend::noise_free;
      cfg.adaptive.backend = MeasurementBackend::noise_free;
    }

    if (c_fisher->parsed()) return cmd_fisher_surface(cfg);
    if (c_shift->parsed()) return cmd_shift_surface(cfg);
    if (c_sweep->parsed()) return cmd_sweep_n(cfg);
    if (c_adapt->parsed()) return cmd_adaptive(cfg);
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace awva::cli
