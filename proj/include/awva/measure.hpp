#pragma once

#include <cstdint>
#include <vector>

#include "awva/core.hpp"
#include "awva/rng.hpp"

namespace awva {

/// Full pre-selection / coupling / post-selection configuration.  The weak
/// value and overlap are computed once at construction.
struct MeasurementModel {
  GaussianPointer pointer;
  TwoLevelState pre;
  TwoLevelState post;
  CouplingConfig coupling;
  WeakValue aw;
  double nu;

  MeasurementModel(const GaussianPointer& pointer_in, const TwoLevelState& pre_in,
                   const TwoLevelState& post_in, const CouplingConfig& coupling_in);
};

/// Convenience constructor for a purely imaginary weak value i*b at
/// theta_i = theta_f = pi/2 (phase difference 2*atan(-b)).
MeasurementModel make_imaginary_weak_model(const GaussianPointer& pointer, double g, double b);

/// Post-selection modulation factor
///   zeta(x, g) = cos^2(xg) + |A_w|^2 sin^2(xg) + Im(A_w) sin(2xg),
/// the conditional acceptance probability divided by the overlap nu.
double zeta(double x, double g, const WeakValue& aw);

/// Analytic d zeta / d g.
double zeta_dg(double x, double g, const WeakValue& aw);

/// Gaussian pointer density P0(x).
double pointer_density(const GaussianPointer& pointer, double x);

/// Integration window [x0 - 10 Delta, x0 + 10 Delta]; the tail beyond
/// contributes < 1e-22 of a Gaussian integral.
std::pair<double, double> quadrature_window(const GaussianPointer& pointer);

/// Post-selection probability P_d = nu * Int P0(x) zeta(x,g) dx, in (0, 1].
/// Computed by adaptive quadrature to 1e-9 relative tolerance.
double postselect_probability(const MeasurementModel& m);

/// Normalized density of accepted pointer values,
///   P(x) = nu P0(x) zeta(x, g) / P_d.
double post_density(const MeasurementModel& m, double x);
/// Same with a precomputed P_d, for evaluation on grids.
double post_density(const MeasurementModel& m, double x, double p_d);

/// Result of a Monte Carlo run: accepted pointer values in draw order.
struct PhotonBatch {
  std::vector<double> accepted_x;
  std::int64_t n_input = 0;
  std::int64_t n_accepted = 0;
  std::uint64_t seed = 0;  ///< fingerprint of the stream that produced the batch
};

/// Exact accept/reject sampling: each photon draws x ~ P0 and is accepted
/// with probability nu * zeta(x, g), a bona fide projection probability.
/// Photon i is a pure function of (stream, i), so the result is identical
/// for any worker count.
PhotonBatch sample_photons(const MeasurementModel& m, std::int64_t n_input,
                           const RandomStream& stream, int workers = 1);

}  // namespace awva
