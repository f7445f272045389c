#include <cstdlib>
#include <cstring>

#include "awva/simd.hpp"

namespace awva::simd {

bool avx2_available() {
#if defined(AWVA_HAVE_AVX2_BUILD) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const Kernels& active_kernels() {
  static const Kernels* chosen = [] {
    const char* force = std::getenv("AWVA_SIMD");
    if (force != nullptr && std::strcmp(force, "scalar") == 0) return &scalar_kernels();
    const Kernels* avx2 = avx2_kernels();
    return avx2 != nullptr ? avx2 : &scalar_kernels();
  }();
  return *chosen;
}

#if !defined(AWVA_HAVE_AVX2_BUILD)
const Kernels* avx2_kernels() { return nullptr; }
#endif

}  // namespace awva::simd
