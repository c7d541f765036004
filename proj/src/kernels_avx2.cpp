// AVX2 kernels. Must match the scalar reference bit-for-bit: four-lane
// reduction order, separate mul/add (no _mm256_fmadd_pd).

#include "cmm/kernels.hpp"

#if defined(CMM_BUILD_AVX2) && (defined(__x86_64__) || defined(_M_X64))

#include <immintrin.h>

namespace cmm::kernels {
namespace {

void add_k(const double* a, const double* b, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(a + i),
                                          _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) y[i] = a[i] + b[i];
}

void sub_k(const double* a, const double* b, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_sub_pd(_mm256_loadu_pd(a + i),
                                          _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) y[i] = a[i] - b[i];
}

void mul_k(const double* a, const double* b, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                          _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) y[i] = a[i] * b[i];
}

void axpy_k(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void mul_acc_k(const double* a, const double* b, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a[i] * b[i];
}

double dot_k(const double* a, const double* b, std::size_t n) {
  __m256d vacc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    vacc = _mm256_add_pd(vacc, prod);
  }
  alignas(32) double acc[4];
  _mm256_store_pd(acc, vacc);
  for (; i < n; ++i) acc[i % 4] += a[i] * b[i];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double sum_k(const double* x, std::size_t n) {
  __m256d vacc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vacc = _mm256_add_pd(vacc, _mm256_loadu_pd(x + i));
  alignas(32) double acc[4];
  _mm256_store_pd(acc, vacc);
  for (; i < n; ++i) acc[i % 4] += x[i];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

void matvec_k(const double* w, const double* x, double* y, std::size_t rows,
              std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_k(w + r * cols, x, cols);
}

void matvec_t_acc_k(const double* w, const double* gy, double* gx,
                    std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_k(gy[r], w + r * cols, gx, cols);
}

void outer_acc_k(const double* gy, const double* x, double* gw,
                 std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_k(gy[r], x, gw + r * cols, cols);
}

}  // namespace

const Ops avx2 = {add_k,    sub_k, mul_k,    axpy_k,         mul_acc_k,
                  dot_k,    sum_k, matvec_k, matvec_t_acc_k, outer_acc_k};

}  // namespace cmm::kernels

#elif defined(__x86_64__) || defined(_M_X64)

// Built without -mavx2 (compiler probe failed); alias the scalar kernels so
// the dispatcher still links.
namespace cmm::kernels {
const Ops avx2 = scalar;
}

#endif
