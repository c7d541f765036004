#include "cmm/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace cmm::kernels {
namespace {

struct Selection {
  const Ops* ops;
  std::string_view name;
};

Selection select() {
#if defined(__x86_64__) || defined(_M_X64)
  const bool have_avx2 = __builtin_cpu_supports("avx2");
#else
  const bool have_avx2 = false;
#endif
  if (const char* env = std::getenv("CMM_KERNELS")) {
    const std::string want(env);
    if (want == "scalar") return {&scalar, "scalar"};
    if (want == "avx2") {
#if defined(__x86_64__) || defined(_M_X64)
      if (have_avx2) return {&avx2, "avx2"};
#endif
      throw std::runtime_error("CMM_KERNELS=avx2 but the CPU lacks AVX2");
    }
    throw std::runtime_error("unknown CMM_KERNELS value: " + want);
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (have_avx2) return {&avx2, "avx2"};
#endif
  return {&scalar, "scalar"};
}

const Selection& selection() {
  static const Selection s = select();
  return s;
}

}  // namespace

const Ops& active() { return *selection().ops; }

std::string_view active_name() { return selection().name; }

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

}  // namespace cmm::kernels
