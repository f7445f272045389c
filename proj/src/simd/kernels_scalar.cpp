#include <cmath>

#include "awva/rng.hpp"
#include "awva/simd.hpp"
#include "detail.hpp"

namespace awva::simd {

namespace detail {

void sincos_poly(double t, double& s, double& c) {
  double n = std::nearbyint(t * kTwoOverPi);
  double r = (t - n * kPio2Hi) - n * kPio2Lo;
  double ps = poly_sin(r);
  double pc = poly_cos(r);
  auto q = static_cast<std::int64_t>(n) & 3;
  switch (q) {
    case 0: s = ps; c = pc; break;
    case 1: s = pc; c = -ps; break;
    case 2: s = -ps; c = -pc; break;
    default: s = -pc; c = ps; break;
  }
}

}  // namespace detail

namespace {

void photon_batch_scalar(const std::array<std::uint32_t, 2>& key, std::uint64_t domain,
                         std::uint64_t i0, std::size_t n, double* normals, double* accept_u) {
  for (std::size_t j = 0; j < n; ++j) {
    std::uint64_t i = i0 + j;
    auto out = philox4x32({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32),
                           static_cast<std::uint32_t>(domain),
                           static_cast<std::uint32_t>(domain >> 32)},
                          key);
    normals[j] = normal_icdf(u01_from_bits(out[0], out[1]));
    accept_u[j] = u01_from_bits(out[2], out[3]);
  }
}

void zeta_batch_scalar(const double* x, std::size_t n, double g, double aw_norm2, double aw_im,
                       double* out) {
  const double amp = aw_norm2 - 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s, c;
    detail::sincos_poly(x[j] * g, s, c);
    out[j] = 1.0 + amp * (s * s) + aw_im * (2.0 * s * c);
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{"scalar", &photon_batch_scalar, &zeta_batch_scalar};
  return k;
}

}  // namespace awva::simd
