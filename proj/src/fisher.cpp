#include "awva/fisher.hpp"

#include <cmath>
#include <numbers>

#include "awva/errors.hpp"
#include "awva/quad.hpp"

namespace awva {
namespace {

constexpr double kDegeneratePd = 1e-30;

// At a zero of zeta (only possible for a purely imaginary weak value) the
// ratio (zeta' - c*zeta)^2 / zeta tends to 4 x^2 (1 + |A_w|^2).
double score_ratio(double x, double zeta_v, double dzeta_v, double c, double aw_norm2) {
  if (zeta_v < 1e-280) return 4.0 * x * x * (1.0 + aw_norm2);
  double num = dzeta_v - c * zeta_v;
  return num * num / zeta_v;
}

}  // namespace

const char* to_string(FisherMethod method) {
  switch (method) {
    case FisherMethod::numeric_quadrature: return "numeric-quadrature";
    case FisherMethod::closed_imaginary: return "closed-imaginary";
    case FisherMethod::swva_limit: return "swva-limit";
    case FisherMethod::qfi: return "qfi";
  }
  return "unknown";
}

FisherResult fisher_numeric(const MeasurementModel& m) {
  const double g = m.coupling.g;
  const double nu = m.nu;
  const double aw_norm2 = m.aw.norm2();
  auto [lo, hi] = quadrature_window(m.pointer);
  auto p0 = [&](double x) { return pointer_density(m.pointer, x); };

  const QuadOptions tight{.rel_tol = 1e-11};
  double ez = integrate([&](double x) { return p0(x) * zeta(x, g, m.aw); }, lo, hi, tight);
  double pd = nu * ez;
  if (pd < kDegeneratePd) throw DegenerateModel("post-selection probability below 1e-30");
  double edz = integrate([&](double x) { return p0(x) * zeta_dg(x, g, m.aw); }, lo, hi,
                         QuadOptions{.rel_tol = 1e-11, .abs_scale = std::fabs(ez)});
  const double c = edz / ez;

  double value = nu * integrate(
                          [&](double x) {
                            return p0(x) * score_ratio(x, zeta(x, g, m.aw), zeta_dg(x, g, m.aw),
                                                       c, aw_norm2);
                          },
                          lo, hi, tight);

  FisherResult result{value, FisherMethod::numeric_quadrature, {}};
  if (!m.coupling.weak_coupling_ok(m.pointer.mean)) result.validity_flags.push_back("weak-coupling");

  // Independent route: central finite difference of log P in g.
  const double h = 1e-6 * std::max(1.0, std::fabs(g));
  double ezp = integrate([&](double x) { return p0(x) * zeta(x, g + h, m.aw); }, lo, hi, tight);
  double ezm = integrate([&](double x) { return p0(x) * zeta(x, g - h, m.aw); }, lo, hi, tight);
  const double dlog_norm = (std::log(ezp) - std::log(ezm)) / (2.0 * h);
  double fd_value =
      nu * integrate(
               [&](double x) {
                 double zp = zeta(x, g + h, m.aw);
                 double zm = zeta(x, g - h, m.aw);
                 double z0 = zeta(x, g, m.aw);
                 if (zp < 1e-100 || zm < 1e-100 || z0 < 1e-100) return 0.0;
                 double score = (std::log(zp) - std::log(zm)) / (2.0 * h) - dlog_norm;
                 return p0(x) * z0 * score * score;
               },
               lo, hi, QuadOptions{.rel_tol = 1e-7, .abs_scale = value / nu});
  if (std::fabs(fd_value - value) > 1e-4 * std::fabs(value)) {
    result.validity_flags.push_back("fd-crosscheck");
  }
  return result;
}

FisherResult fisher_closed_imag(const GaussianPointer& pointer, double g, double b) {
  const double x2m = pointer.second_moment();
  const double den = 1.0 + x2m * b * b * g * g + 2.0 * pointer.mean * b * g;
  if (den <= 1e-12) throw SingularDenominator("closed-form Fisher denominator vanished");
  FisherResult result{4.0 * pointer.variance / den, FisherMethod::closed_imaginary, {}};
  if (std::fabs(b) < 20.0) result.validity_flags.push_back("large-b");
  if (std::fabs(g * pointer.mean) >= 0.1) result.validity_flags.push_back("weak-coupling");
  return result;
}

FisherResult fisher_swva_limit(const GaussianPointer& pointer) {
  return FisherResult{4.0 * pointer.variance, FisherMethod::swva_limit, {}};
}

WeakValue optimal_imag_weak_value(const GaussianPointer& pointer, double g) {
  if (g == 0.0) throw ZeroCoupling("optimal weak value diverges at g = 0");
  return WeakValue{0.0, -pointer.mean / (pointer.second_moment() * g)};
}

FisherResult qfi_closed(const GaussianPointer& pointer, double theta_i) {
  const double c = std::cos(theta_i);
  return FisherResult{4.0 * (pointer.second_moment() - c * c * pointer.mean * pointer.mean),
                      FisherMethod::qfi,
                      {}};
}

FisherResult qfi_numeric(const GaussianPointer& pointer, double theta_i, double g) {
  (void)g;  // cancels exactly in both inner products
  auto [lo, hi] = quadrature_window(pointer);
  auto p0 = [&](double x) { return pointer_density(pointer, x); };
  double m2 = integrate([&](double x) { return x * x * p0(x); }, lo, hi,
                        QuadOptions{.rel_tol = 1e-12, .abs_scale = pointer.second_moment()});
  double m1 = integrate([&](double x) { return x * p0(x); }, lo, hi,
                        QuadOptions{.rel_tol = 1e-12, .abs_scale = pointer.width()});
  const double c = std::cos(theta_i);
  return FisherResult{4.0 * (m2 - c * c * m1 * m1), FisherMethod::qfi, {}};
}

double error_limit(const FisherResult& info, double n) {
  if (!(info.value > 0.0)) throw NonpositiveInformation("error limit needs positive information");
  if (!(n >= 1.0)) throw ConfigError("error limit needs n >= 1");
  return 1.0 / std::sqrt(n * info.value);
}

std::pair<TwoLevelState, TwoLevelState> matched_overlap_states(double nu, double a) {
  if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("matched_overlap_states: nu outside (0,1)");
  const double half_pi = std::numbers::pi / 2.0;
  const double ctf = 2.0 * nu * a;
  if (std::fabs(ctf) >= 1.0) throw ConfigError("matched_overlap_states: |2 nu a| >= 1");
  const double stf = std::sqrt(1.0 - ctf * ctf);
  const double ce = (2.0 * nu - 1.0) / stf;
  if (std::fabs(ce) > 1.0) throw ConfigError("matched_overlap_states: overlap unreachable");
  // acos branch gives sin(eps0) >= 0, hence Im(A_w) <= 0.
  const double eps0 = std::acos(ce);
  return {TwoLevelState(half_pi, 0.0), TwoLevelState(std::acos(ctf), eps0)};
}

}  // namespace awva
