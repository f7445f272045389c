#pragma once

#include <functional>

namespace awva {

struct QuadOptions {
  double rel_tol = 1e-9;
  /// Scale floor used when the integral itself is (near) zero; the accepted
  /// absolute error is rel_tol * max(|whole estimate|, abs_scale).
  double abs_scale = 0.0;
  int max_depth = 52;
};

/// Adaptive Simpson integration of f over [a, b].
/// Throws QuadratureFailure if the tolerance cannot be met within max_depth.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt = {});

}  // namespace awva
