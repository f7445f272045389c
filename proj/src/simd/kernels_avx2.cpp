// AVX2 variants of the sampling kernels.  Every floating-point operation
// mirrors the scalar reference in both order and instruction choice (no FMA
// contraction), so the two paths produce bit-identical output; the
// equivalence tests assert exact equality.

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cstdint>

#include "awva/rng.hpp"
#include "awva/simd.hpp"
#include "detail.hpp"

namespace awva::simd {
namespace {

using detail::kPio2Hi;
using detail::kPio2Lo;
using detail::kTwoOverPi;

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

// hi/lo 32x32->64 products for all eight 32-bit lanes.
inline void mulhilo8(__m256i x, std::uint32_t m, __m256i& hi, __m256i& lo) {
  const __m256i mv = _mm256_set1_epi32(static_cast<int>(m));
  __m256i even = _mm256_mul_epu32(x, mv);
  __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(x, 32), mv);
  lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0xAA);
}

// Exact u64 -> double for v < 2^53.
inline __m256d u64_to_double(__m256i v) {
  const __m256i hi_magic = _mm256_set1_epi64x(0x4530000000000000ll);
  const __m256i lo_magic = _mm256_set1_epi64x(0x4330000000000000ll);
  __m256i hi = _mm256_or_si256(_mm256_srli_epi64(v, 32), hi_magic);
  __m256i lo = _mm256_or_si256(_mm256_and_si256(v, _mm256_set1_epi64x(0xFFFFFFFFll)), lo_magic);
  __m256d d = _mm256_sub_pd(_mm256_castsi256_pd(hi), _mm256_set1_pd(1.9342813118337666e+25));
  return _mm256_add_pd(d, _mm256_castsi256_pd(lo));
}

// ((v >> 11) + 0.5) * 2^-53, identical to u01_from_bits.
inline __m256d u01_from_u64(__m256i v) {
  __m256d d = u64_to_double(_mm256_srli_epi64(v, 11));
  d = _mm256_add_pd(d, _mm256_set1_pd(0.5));
  return _mm256_mul_pd(d, _mm256_set1_pd(0x1.0p-53));
}

// Pair 32-bit lanes (hi_src even/odd, lo_src even/odd) into per-photon u64s.
inline __m256i pack_even(__m256i hi_words, __m256i lo_words) {
  __m256i hi = _mm256_slli_epi64(hi_words, 32);
  __m256i lo = _mm256_and_si256(lo_words, _mm256_set1_epi64x(0xFFFFFFFFll));
  return _mm256_or_si256(hi, lo);
}

inline __m256i pack_odd(__m256i hi_words, __m256i lo_words) {
  __m256i hi = _mm256_and_si256(hi_words, _mm256_set1_epi64x(0xFFFFFFFF00000000ull));
  __m256i lo = _mm256_srli_epi64(lo_words, 32);
  return _mm256_or_si256(hi, lo);
}

// AS241 central branch for four lanes; mask reports lanes it covered.
inline __m256d icdf_central(__m256d u, __m256d& covered) {
  const __m256d half = _mm256_set1_pd(0.5);
  __m256d q = _mm256_sub_pd(u, half);
  __m256d aq = _mm256_andnot_pd(_mm256_set1_pd(-0.0), q);
  covered = _mm256_cmp_pd(aq, _mm256_set1_pd(0.425), _CMP_LE_OQ);
  __m256d r = _mm256_sub_pd(_mm256_set1_pd(0.180625), _mm256_mul_pd(q, q));

  auto horner8 = [](__m256d x, const double* k) {
    __m256d acc = _mm256_set1_pd(k[0]);
    for (int i = 1; i < 8; ++i) {
      acc = _mm256_add_pd(_mm256_mul_pd(acc, x), _mm256_set1_pd(k[i]));
    }
    return acc;
  };
  static const double na[8] = {2.5090809287301226727e3, 3.3430575583588128105e4,
                               6.7265770927008700853e4, 4.5921953931549871457e4,
                               1.3731693765509461125e4, 1.9715909503065514427e3,
                               1.3314166789178437745e2, 3.3871328727963666080e0};
  static const double nb[8] = {5.2264952788528545610e3, 2.8729085735721942674e4,
                               3.9307895800092710610e4, 2.1213794301586595867e4,
                               5.3941960214247511077e3, 6.8718700749205790830e2,
                               4.2313330701600911252e1, 1.0};
  __m256d num = horner8(r, na);
  __m256d den = horner8(r, nb);
  // (q * num) / den, matching the scalar expression's precedence exactly
  return _mm256_div_pd(_mm256_mul_pd(q, num), den);
}

void photon_batch_avx2(const std::array<std::uint32_t, 2>& key, std::uint64_t domain,
                       std::uint64_t i0, std::size_t n, double* normals, double* accept_u) {
  const __m256i dom_lo = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(domain)));
  const __m256i dom_hi = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(domain >> 32)));

  std::size_t j = 0;
  alignas(32) double u1buf[8];
  alignas(32) double u2buf[8];
  for (; j + 8 <= n; j += 8) {
    __m256i x0, x1;
    {
      alignas(32) std::uint32_t lo[8], hi[8];
      for (int l = 0; l < 8; ++l) {
        std::uint64_t idx = i0 + j + static_cast<std::uint64_t>(l);
        lo[l] = static_cast<std::uint32_t>(idx);
        hi[l] = static_cast<std::uint32_t>(idx >> 32);
      }
      x0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lo));
      x1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(hi));
    }
    __m256i x2 = dom_lo, x3 = dom_hi;
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
      __m256i hi0, lo0, hi1, lo1;
      mulhilo8(x0, kM0, hi0, lo0);
      mulhilo8(x2, kM1, hi1, lo1);
      __m256i k0v = _mm256_set1_epi32(static_cast<int>(k0));
      __m256i k1v = _mm256_set1_epi32(static_cast<int>(k1));
      __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, x1), k0v);
      __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, x3), k1v);
      x0 = n0;
      x1 = lo1;
      x2 = n2;
      x3 = lo0;
      k0 += kW0;
      k1 += kW1;
    }

    // u1 from words (0,1), u2 from words (2,3); photons 0,2,4,6 then 1,3,5,7.
    __m256d u1e = u01_from_u64(pack_even(x0, x1));
    __m256d u1o = u01_from_u64(pack_odd(x0, x1));
    __m256d u2e = u01_from_u64(pack_even(x2, x3));
    __m256d u2o = u01_from_u64(pack_odd(x2, x3));
    _mm256_store_pd(u1buf, u1e);
    _mm256_store_pd(u1buf + 4, u1o);
    _mm256_store_pd(u2buf, u2e);
    _mm256_store_pd(u2buf + 4, u2o);
    for (int l = 0; l < 4; ++l) {
      accept_u[j + 2 * l] = u2buf[l];
      accept_u[j + 2 * l + 1] = u2buf[4 + l];
    }

    alignas(32) double u1interleaved[8];
    for (int l = 0; l < 4; ++l) {
      u1interleaved[2 * l] = u1buf[l];
      u1interleaved[2 * l + 1] = u1buf[4 + l];
    }
    for (int half = 0; half < 2; ++half) {
      __m256d u = _mm256_load_pd(u1interleaved + 4 * half);
      __m256d covered;
      __m256d z = icdf_central(u, covered);
      int tails = _mm256_movemask_pd(covered) ^ 0xF;
      alignas(32) double zbuf[4];
      _mm256_store_pd(zbuf, z);
      if (tails != 0) {
        alignas(32) double ubuf[4];
        _mm256_store_pd(ubuf, u);
        for (int l = 0; l < 4; ++l) {
          if (tails & (1 << l)) zbuf[l] = normal_icdf(ubuf[l]);
        }
      }
      for (int l = 0; l < 4; ++l) normals[j + 4 * half + l] = zbuf[l];
    }
  }

  if (j < n) scalar_kernels().photon_batch(key, domain, i0 + j, n - j, normals + j, accept_u + j);
}

void zeta_batch_avx2(const double* x, std::size_t n, double g, double aw_norm2, double aw_im,
                     double* out) {
  const __m256d gv = _mm256_set1_pd(g);
  const __m256d amp = _mm256_set1_pd(aw_norm2 - 1.0);
  const __m256d imv = _mm256_set1_pd(aw_im);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d signbit = _mm256_set1_pd(-0.0);

  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d t = _mm256_mul_pd(_mm256_loadu_pd(x + j), gv);
    __m256d nn = _mm256_round_pd(_mm256_mul_pd(t, _mm256_set1_pd(kTwoOverPi)),
                                 _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_sub_pd(_mm256_sub_pd(t, _mm256_mul_pd(nn, _mm256_set1_pd(kPio2Hi))),
                              _mm256_mul_pd(nn, _mm256_set1_pd(kPio2Lo)));
    __m256d z = _mm256_mul_pd(r, r);

    __m256d ps = _mm256_add_pd(_mm256_mul_pd(z, _mm256_set1_pd(detail::kS6)),
                               _mm256_set1_pd(detail::kS5));
    ps = _mm256_add_pd(_mm256_mul_pd(z, ps), _mm256_set1_pd(detail::kS4));
    ps = _mm256_add_pd(_mm256_mul_pd(z, ps), _mm256_set1_pd(detail::kS3));
    ps = _mm256_add_pd(_mm256_mul_pd(z, ps), _mm256_set1_pd(detail::kS2));
    ps = _mm256_add_pd(_mm256_mul_pd(z, ps), _mm256_set1_pd(detail::kS1));
    ps = _mm256_add_pd(r, _mm256_mul_pd(_mm256_mul_pd(r, z), ps));

    __m256d pc = _mm256_add_pd(_mm256_mul_pd(z, _mm256_set1_pd(detail::kC6)),
                               _mm256_set1_pd(detail::kC5));
    pc = _mm256_add_pd(_mm256_mul_pd(z, pc), _mm256_set1_pd(detail::kC4));
    pc = _mm256_add_pd(_mm256_mul_pd(z, pc), _mm256_set1_pd(detail::kC3));
    pc = _mm256_add_pd(_mm256_mul_pd(z, pc), _mm256_set1_pd(detail::kC2));
    pc = _mm256_add_pd(_mm256_mul_pd(z, pc), _mm256_set1_pd(detail::kC1));
    pc = _mm256_add_pd(_mm256_sub_pd(one, _mm256_mul_pd(half, z)),
                       _mm256_mul_pd(_mm256_mul_pd(z, z), pc));

    __m128i k = _mm256_cvtpd_epi32(nn);
    __m256i k1 = _mm256_cvtepi32_epi64(
        _mm_cmpeq_epi32(_mm_and_si128(k, _mm_set1_epi32(1)), _mm_set1_epi32(1)));
    __m256i k2 = _mm256_cvtepi32_epi64(
        _mm_cmpeq_epi32(_mm_and_si128(k, _mm_set1_epi32(2)), _mm_set1_epi32(2)));
    __m256d swap = _mm256_castsi256_pd(k1);
    __m256d neg_s = _mm256_castsi256_pd(k2);
    __m256d neg_c = _mm256_xor_pd(_mm256_castsi256_pd(k1), _mm256_castsi256_pd(k2));

    __m256d s = _mm256_blendv_pd(ps, pc, swap);
    __m256d c = _mm256_blendv_pd(pc, ps, swap);
    s = _mm256_xor_pd(s, _mm256_and_pd(neg_s, signbit));
    c = _mm256_xor_pd(c, _mm256_and_pd(neg_c, signbit));

    __m256d s2 = _mm256_mul_pd(s, s);
    __m256d sin2 = _mm256_mul_pd(_mm256_mul_pd(two, s), c);
    __m256d zeta = _mm256_add_pd(_mm256_add_pd(one, _mm256_mul_pd(amp, s2)),
                                 _mm256_mul_pd(imv, sin2));
    _mm256_storeu_pd(out + j, zeta);
  }

  if (j < n) scalar_kernels().zeta_batch(x + j, n - j, g, aw_norm2, aw_im, out + j);
}

}  // namespace

const Kernels* avx2_kernels() {
  static const Kernels k{"avx2", &photon_batch_avx2, &zeta_batch_avx2};
  if (!avx2_available()) return nullptr;
  return &k;
}

}  // namespace awva::simd

#endif  // x86
