#include <cstdlib>
#include <string>

#include "hfbm/simd.hpp"
#include "kernels_internal.hpp"

namespace hfbm::simd {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &detail::dot_scalar,
                              &detail::polyphase_analysis_scalar,
                              &detail::strided_correlate_scalar};

#if defined(HFBM_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, &detail::dot_avx2, &detail::polyphase_analysis_avx2,
                            &detail::strided_correlate_avx2};
#endif

const KernelTable& select() {
  if (const char* env = std::getenv("HFBM_SIMD")) {
    if (std::string(env) == "scalar") return kScalar;
  }
  if (isa_available(Isa::Avx2)) return kernels_for(Isa::Avx2);
  return kScalar;
}

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(HFBM_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
#if defined(HFBM_HAVE_AVX2)
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) return kAvx2;
#endif
  (void)isa;
  return kScalar;
}

const KernelTable& kernels() {
  static const KernelTable& table = select();
  return table;
}

std::string_view isa_name(Isa isa) {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

}  // namespace hfbm::simd
