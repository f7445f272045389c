#pragma once

#include "awva/measure.hpp"

namespace awva {

/// Time-delay measurement configuration, internal units rad/fs and fs.
/// A birefringent delay tau between the two polarization components maps to
/// the generic model with coupling g = tau/2 and pointer variable omega.
struct TimeDelayScenario {
  double omega0;   ///< mean angular frequency (rad/fs)
  double delta;    ///< spectral width Delta (rad/fs)
  double tau;      ///< true time delay (fs)
  double epsilon;  ///< post-selection angle (rad), in (0, pi)

  TimeDelayScenario(double omega0_in, double delta_in, double tau_in, double epsilon_in);

  TimeDelayScenario with_epsilon(double eps) const {
    return TimeDelayScenario(omega0, delta, tau, eps);
  }
  TimeDelayScenario with_tau(double t) const {
    return TimeDelayScenario(omega0, delta, t, epsilon);
  }

  bool weak_coupling_ok() const;
  double second_moment() const { return omega0 * omega0 + delta * delta; }
};

/// Generic measurement model: pointer N(omega0, Delta^2), pre (pi/2, 0),
/// post (pi/2, pi - epsilon), coupling g = tau/2.  The induced weak value is
/// -i cot(epsilon/2).
MeasurementModel to_measurement_model(const TimeDelayScenario& s);

/// Post-selection probability, mean spectral shift and central second moment
/// of the accepted spectrum, all in closed form (exact for the Gaussian
/// intensity profile).
struct AcceptedMoments {
  double p_d;       ///< acceptance probability
  double shift;     ///< mean accepted omega minus omega0
  double variance;  ///< variance of the accepted omega
};
AcceptedMoments accepted_moments(const TimeDelayScenario& s);

/// Closed-form mean spectral shift of accepted photons,
///   dw = s^2 t e^{-s^2 t^2/2} sin(w0 t - eps) / (1 - e^{-s^2 t^2/2} cos(w0 t - eps)).
double spectrum_shift(const TimeDelayScenario& s);

/// Linearization 2 (w0 tau - eps) / tau, valid near the zero crossing.
double spectrum_shift_linear(const TimeDelayScenario& s);

/// True when |w0 tau - eps| <= 0.3 Delta tau, the window where the linear
/// form tracks the full expression to about a percent.
bool linear_window_ok(const TimeDelayScenario& s);

/// Information-optimal post-selection angle <w^2>_0 tau / w0.
double epsilon_opt(const TimeDelayScenario& s);

/// Inversion of the linearized shift: tau_hat = 2 eps / (2 w0 - dw).
double estimate_tau(double epsilon, double delta_omega, double omega0);

}  // namespace awva
