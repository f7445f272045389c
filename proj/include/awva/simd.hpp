#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace awva::simd {

/// Batch kernels for the photon sampling pipeline.  The scalar entries are
/// the reference; the AVX2 entries are drop-in variants that produce
/// bit-identical output (same polynomial kernels, same rounding order), so
/// sampled data does not depend on which instruction set served it.
struct Kernels {
  const char* name;

  /// One Philox block per index i in [i0, i0+n): word pair (0,1) becomes a
  /// standard normal via the inverse CDF, word pair (2,3) the acceptance
  /// uniform in (0,1).
  void (*photon_batch)(const std::array<std::uint32_t, 2>& key, std::uint64_t domain,
                       std::uint64_t i0, std::size_t n, double* normals, double* accept_u);

  /// out[i] = 1 + (|A_w|^2 - 1) sin^2(x_i g) + Im(A_w) sin(2 x_i g).
  void (*zeta_batch)(const double* x, std::size_t n, double g, double aw_norm2, double aw_im,
                     double* out);
};

const Kernels& scalar_kernels();

/// AVX2 variants, or nullptr when the build or the CPU lacks them.
const Kernels* avx2_kernels();

/// Runtime selection: AVX2 when available unless AWVA_SIMD=scalar is set in
/// the environment.
const Kernels& active_kernels();

bool avx2_available();

namespace detail {
/// sin/cos kernel shared by the scalar and AVX2 paths (Cody-Waite reduction
/// plus the classic degree-13/12 minimax polynomials).
void sincos_poly(double t, double& s, double& c);
}  // namespace detail

}  // namespace awva::simd
