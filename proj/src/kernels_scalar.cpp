// Scalar reference kernels. These define the floating-point contract the
// SIMD variants must reproduce bit-for-bit (see kernels.hpp).

#include "cmm/kernels.hpp"

namespace cmm::kernels {
namespace {

void add_k(const double* a, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] + b[i];
}

void sub_k(const double* a, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] - b[i];
}

void mul_k(const double* a, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}

void axpy_k(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void mul_acc_k(const double* a, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a[i] * b[i];
}

double dot_k(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += a[i] * b[i];
    acc[1] += a[i + 1] * b[i + 1];
    acc[2] += a[i + 2] * b[i + 2];
    acc[3] += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) acc[i % 4] += a[i] * b[i];
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double sum_k(const double* x, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += x[i];
    acc[1] += x[i + 1];
    acc[2] += x[i + 2];
    acc[3] += x[i + 3];
  }
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

const Ops scalar = {add_k,    sub_k, mul_k,    axpy_k,         mul_acc_k,
                    dot_k,    sum_k, matvec_k, matvec_t_acc_k, outer_acc_k};

}  // namespace cmm::kernels
