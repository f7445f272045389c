#include "awva/timedelay.hpp"

#include <cmath>
#include <numbers>

#include "awva/errors.hpp"

namespace awva {
namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TimeDelayScenario::TimeDelayScenario(double omega0_in, double delta_in, double tau_in,
                                     double epsilon_in)
    : omega0(omega0_in), delta(delta_in), tau(tau_in), epsilon(epsilon_in) {
  if (!(omega0 > 0.0)) throw ConfigError("scenario requires omega0 > 0");
  if (!(delta > 0.0)) throw ConfigError("scenario requires delta > 0");
  if (!std::isfinite(tau)) throw ConfigError("scenario requires finite tau");
  if (!(epsilon > 0.0 && epsilon < kPi)) {
    throw ConfigError("post-selection angle must lie in (0, pi)");
  }
}

bool TimeDelayScenario::weak_coupling_ok() const { return std::fabs(omega0 * tau) < 0.1; }

MeasurementModel to_measurement_model(const TimeDelayScenario& s) {
  GaussianPointer pointer(s.omega0, s.delta * s.delta);
  TwoLevelState pre(kPi / 2.0, 0.0);
  TwoLevelState post(kPi / 2.0, kPi - s.epsilon);
  return MeasurementModel(pointer, pre, post, CouplingConfig{s.tau / 2.0});
}

AcceptedMoments accepted_moments(const TimeDelayScenario& s) {
  const double v = s.delta * s.delta;
  const double a = 0.5 * v * s.tau * s.tau;
  const double u = s.omega0 * s.tau - s.epsilon;
  // den = 1 - e^{-a} cos u, assembled from small quantities so that the
  // near-cancellation at the zero crossing costs no precision.
  const double half_u_sin = std::sin(0.5 * u);
  const double den = 2.0 * half_u_sin * half_u_sin + std::cos(u) * (-std::expm1(-a));
  AcceptedMoments out{};
  out.p_d = 0.5 * den;
  if (den < 1e-30) throw SingularDenominator("accepted spectrum undefined: zero acceptance");
  const double e = std::exp(-a);
  out.shift = v * s.tau * e * std::sin(u) / den;
  // E[(w-w0)^2 | accepted] = v (1 + v tau^2 e^{-a} cos u / den)
  const double m2 = v * (1.0 + v * s.tau * s.tau * e * std::cos(u) / den);
  out.variance = m2 - out.shift * out.shift;
  return out;
}

double spectrum_shift(const TimeDelayScenario& s) { return accepted_moments(s).shift; }

double spectrum_shift_linear(const TimeDelayScenario& s) {
  if (s.tau == 0.0) throw ZeroDelay("linearized shift undefined at tau = 0");
  return 2.0 * (s.omega0 * s.tau - s.epsilon) / s.tau;
}

bool linear_window_ok(const TimeDelayScenario& s) {
  return std::fabs(s.omega0 * s.tau - s.epsilon) <= 0.3 * s.delta * std::fabs(s.tau);
}

double epsilon_opt(const TimeDelayScenario& s) { return s.second_moment() * s.tau / s.omega0; }

double estimate_tau(double epsilon, double delta_omega, double omega0) {
  const double den = 2.0 * omega0 - delta_omega;
  if (!(den > 0.0)) throw SingularDenominator("tau estimate: denominator not positive");
  return 2.0 * epsilon / den;
}

}  // namespace awva
