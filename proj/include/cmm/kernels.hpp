#pragma once
// Dense double-precision kernels backing the tape's vector primitives.
//
// Two implementations exist: a scalar reference and an AVX2 variant. Both
// follow the same floating-point contract so results are bit-identical
// regardless of which one the dispatcher picks:
//   * reductions (dot, sum) accumulate into four independent lanes,
//     lane = i % 4, and combine as (acc0 + acc2) + (acc1 + acc3);
//   * no FMA contraction - every multiply and add rounds separately.
// Checkpoints and reports therefore do not depend on the host ISA.

#include <cstddef>
#include <string_view>

namespace cmm::kernels {

struct Ops {
  // y[i] = a[i] OP b[i]
  void (*add)(const double* a, const double* b, double* y, std::size_t n);
  void (*sub)(const double* a, const double* b, double* y, std::size_t n);
  void (*mul)(const double* a, const double* b, double* y, std::size_t n);

  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y[i] += a[i] * b[i]
  void (*mul_acc)(const double* a, const double* b, double* y, std::size_t n);

  // four-lane reductions
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* x, std::size_t n);

  // w is rows x cols, row-major
  void (*matvec)(const double* w, const double* x, double* y, std::size_t rows,
                 std::size_t cols);
  // gx[c] += sum_r w[r,c] * gy[r]
  void (*matvec_t_acc)(const double* w, const double* gy, double* gx,
                       std::size_t rows, std::size_t cols);
  // gw[r,c] += gy[r] * x[c]
  void (*outer_acc)(const double* gy, const double* x, double* gw,
                    std::size_t rows, std::size_t cols);
};

extern const Ops scalar;
#if defined(__x86_64__) || defined(_M_X64)
extern const Ops avx2;
#endif

// Active implementation. Resolved once: CMM_KERNELS=scalar|avx2 forces a
// variant, otherwise the best one the CPU supports is used.
const Ops& active();
std::string_view active_name();
bool avx2_available();

}  // namespace cmm::kernels
