#pragma once

#include <cstdint>
#include <vector>

#include "awva/rng.hpp"

namespace awva {

double mean(const std::vector<double>& v);
double median(std::vector<double> v);
double rms(const std::vector<double>& v);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double gamma_q(double a, double x);

/// Survival function of the chi-square distribution with k dof.
inline double chi2_sf(double x, double k) { return gamma_q(0.5 * k, 0.5 * x); }

/// Exact Binomial(n, p) draw via geometric inter-success skips; O(n*p)
/// expected work, which suits the tiny acceptance probabilities here.
std::int64_t binomial_draw(std::int64_t n, double p, StreamCursor& cursor);

}  // namespace awva
