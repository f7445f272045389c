#pragma once

#include <cstdint>

namespace awva::simd::detail {

// Two-term Cody-Waite split of pi/2.
inline constexpr double kPio2Hi = 1.57079632679489655800e+00;
inline constexpr double kPio2Lo = 6.12323399573676603587e-17;
inline constexpr double kTwoOverPi = 6.36619772367581382433e-01;

// fdlibm __kernel_sin / __kernel_cos coefficients, |r| <= pi/4.
inline constexpr double kS1 = -1.66666666666666324348e-01;
inline constexpr double kS2 = 8.33333333332248946124e-03;
inline constexpr double kS3 = -1.98412698298579493134e-04;
inline constexpr double kS4 = 2.75573137070700676789e-06;
inline constexpr double kS5 = -2.50507602534068634195e-08;
inline constexpr double kS6 = 1.58969099521155010221e-10;

inline constexpr double kC1 = 4.16666666666666019037e-02;
inline constexpr double kC2 = -1.38888888888741095749e-03;
inline constexpr double kC3 = 2.48015872894767294178e-05;
inline constexpr double kC4 = -2.75573143513906633035e-07;
inline constexpr double kC5 = 2.08757232129817482790e-09;
inline constexpr double kC6 = -1.13596475577881948265e-11;

inline double poly_sin(double r) {
  double z = r * r;
  return r + r * z * (kS1 + z * (kS2 + z * (kS3 + z * (kS4 + z * (kS5 + z * kS6)))));
}

inline double poly_cos(double r) {
  double z = r * r;
  return 1.0 - 0.5 * z + z * z * (kC1 + z * (kC2 + z * (kC3 + z * (kC4 + z * (kC5 + z * kC6)))));
}

}  // namespace awva::simd::detail
