#pragma once

#include <string>
#include <utility>
#include <vector>

#include "awva/core.hpp"
#include "awva/measure.hpp"

namespace awva {

enum class FisherMethod { numeric_quadrature, closed_imaginary, swva_limit, qfi };

const char* to_string(FisherMethod method);

/// Fisher information with provenance and any violated small-parameter
/// assumptions.  Closed forms are asymptotic; the numeric path is the ground
/// truth, so violations raise flags instead of errors.
struct FisherResult {
  double value = 0.0;
  FisherMethod method = FisherMethod::numeric_quadrature;
  std::vector<std::string> validity_flags;
};

/// Classical Fisher information about g carried by the post-selected events,
///   I(g) = P_d * Int (d log P / d g)^2 P dx,
/// evaluated by adaptive quadrature with the analytic derivative of zeta and
/// of P_d, then cross-checked against a central finite difference of log P
/// (flag "fd-crosscheck" on mismatch beyond 1e-4 relative).
FisherResult fisher_numeric(const MeasurementModel& m);

/// Closed form for a purely imaginary weak value i*b,
///   I(g) = 4 sigma^2 / (1 + <x^2>_0 b^2 g^2 + 2 x0 b g),
/// asymptotically valid for |b| >> 1 and |g x0| << 1.
FisherResult fisher_closed_imag(const GaussianPointer& pointer, double g, double b);

/// The SWVA small-coupling limit 4 Delta^2.
FisherResult fisher_swva_limit(const GaussianPointer& pointer);

/// Information-optimal weak value -i x0 / (<x^2>_0 g).
WeakValue optimal_imag_weak_value(const GaussianPointer& pointer, double g);

/// Quantum Fisher information of the coupled joint state,
///   Q = 4 [ <x^2>_0 - cos^2(theta_i) x0^2 ].
FisherResult qfi_closed(const GaussianPointer& pointer, double theta_i);

/// Same quantity from the defining inner products, with the pointer moments
/// evaluated by quadrature.  The e^{+-igx} phases cancel inside each modulus,
/// so the result is g-independent; g is accepted to make that checkable.
FisherResult qfi_numeric(const GaussianPointer& pointer, double theta_i, double g);

/// Cramer-Rao style error limit 1/sqrt(n * I).
double error_limit(const FisherResult& info, double n);

/// Pre/post states with theta_i = pi/2 whose overlap equals nu while the
/// weak value's real part equals a (|A_w|^2 stays 1/nu - 1).  Used to scan
/// the information against the real part at matched post-selection odds.
std::pair<TwoLevelState, TwoLevelState> matched_overlap_states(double nu, double a);

}  // namespace awva
