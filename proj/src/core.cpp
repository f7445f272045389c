#include "awva/core.hpp"

#include <cmath>
#include <numbers>

#include "awva/errors.hpp"

namespace awva {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kThetaTolerance = 1e-12;

double clamp_theta(double theta) {
  if (!std::isfinite(theta)) throw ConfigError("state angle must be finite");
  if (theta < 0.0) {
    if (theta < -kThetaTolerance) throw ConfigError("state angle outside [0, pi]");
    return 0.0;
  }
  if (theta > kPi) {
    if (theta > kPi + kThetaTolerance) throw ConfigError("state angle outside [0, pi]");
    return kPi;
  }
  return theta;
}

double reduce_phase(double phase) {
  if (!std::isfinite(phase)) throw ConfigError("state phase must be finite");
  double p = std::fmod(phase, 2.0 * kPi);
  if (p < 0.0) p += 2.0 * kPi;
  return p;
}

}  // namespace

TwoLevelState::TwoLevelState(double theta_in, double phase_in)
    : theta(clamp_theta(theta_in)), phase(reduce_phase(phase_in)) {}

GaussianPointer::GaussianPointer(double mean_in, double variance_in)
    : mean(mean_in), variance(variance_in) {
  if (!std::isfinite(mean) || !std::isfinite(variance) || variance <= 0.0) {
    throw ConfigError("pointer requires finite mean and positive variance");
  }
}

double GaussianPointer::width() const { return std::sqrt(variance); }

bool CouplingConfig::weak_coupling_ok(double x0) const { return std::fabs(g * x0) < 0.1; }

double overlap_probability(const TwoLevelState& pre, const TwoLevelState& post) {
  // |<f|i>|^2 with <f|i> = c- + c+ e^{i eps0}; the sum-of-squares form keeps
  // the result nonnegative all the way into the orthogonal corner.
  const double cm = std::cos(pre.theta / 2.0) * std::cos(post.theta / 2.0);
  const double cp = std::sin(pre.theta / 2.0) * std::sin(post.theta / 2.0);
  const double eps0 = post.phase - pre.phase;
  const double re = cm + cp * std::cos(eps0);
  const double im = cp * std::sin(eps0);
  double nu = re * re + im * im;
  return nu > 1.0 ? 1.0 : nu;
}

WeakValue weak_value(const TwoLevelState& pre, const TwoLevelState& post) {
  const double nu = overlap_probability(pre, post);
  if (nu < kOrthogonalOverlap) {
    throw OrthogonalStatesError("weak value diverges: pre/post states are orthogonal");
  }
  const double eps0 = post.phase - pre.phase;
  const double den = 2.0 * nu;
  const double a = std::cos(pre.theta) + std::cos(post.theta);
  const double b = -std::sin(pre.theta) * std::sin(post.theta) * std::sin(eps0);
  return WeakValue{a / den, b / den};
}

std::pair<double, double> optimality_angles() { return {kPi / 2.0, kPi / 2.0}; }

}  // namespace awva
