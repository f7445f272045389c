#pragma once

#include <utility>

namespace awva {

/// Pure state of the two-level system, cos(theta/2)|-1> + sin(theta/2)e^{i phase}|+1>.
/// The coupling operator has eigenvalue +1 on |-1> and -1 on |+1>, so the
/// evolution phases are e^{-igx} on |-1> and e^{+igx} on |+1>.
struct TwoLevelState {
  double theta;  ///< polar angle, clamped to [0, pi]
  double phase;  ///< relative phase, reduced mod 2*pi

  TwoLevelState(double theta_in, double phase_in);
};

/// Gaussian pointer profile with mean x0 and variance Delta^2.
struct GaussianPointer {
  double mean;
  double variance;

  GaussianPointer(double mean_in, double variance_in);

  double second_moment() const { return mean * mean + variance; }
  double width() const;
};

/// Complex weak value A_w = re + i*im.
struct WeakValue {
  double re = 0.0;
  double im = 0.0;

  double norm2() const { return re * re + im * im; }
};

/// Coupling strength of U(g) = exp(-i g A x).  |g*x0| << 1 is the model's
/// validity region; operations flag rather than reject beyond |g*x0| < 0.1.
struct CouplingConfig {
  double g = 0.0;

  bool weak_coupling_ok(double x0) const;
};

/// Overlap |<post|pre>|^2 in [0, 1].
double overlap_probability(const TwoLevelState& pre, const TwoLevelState& post);

/// Threshold below which states are treated as orthogonal and the weak value
/// as divergent.
inline constexpr double kOrthogonalOverlap = 1e-30;

/// Weak value <post|A|pre>/<post|pre> for the two-level closed form.  Only
/// the phase difference post.phase - pre.phase enters.
/// Throws OrthogonalStatesError when the overlap is below kOrthogonalOverlap.
WeakValue weak_value(const TwoLevelState& pre, const TwoLevelState& post);

/// The (theta_i, theta_f) pair that maximizes the quantum Fisher information
/// and makes the weak value purely imaginary: (pi/2, pi/2).
std::pair<double, double> optimality_angles();

}  // namespace awva
