// Built only on aarch64, where NEON is part of the base ISA.

#include <arm_neon.h>

#include <cmath>

#include "gradplast/simd/kernels.hpp"

namespace gradplast::simd::detail {

namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] += a * x[i];
}

void xpby_neon(const double* x, double b, double* y, std::size_t n) {
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(x + i), vmulq_f64(vb, vld1q_f64(y + i))));
  for (; i < n; ++i) y[i] = x[i] + b * y[i];
}

double bwss_neon(const double* w, const double* x, std::size_t n_blocks, std::size_t block) {
  double s = 0.0;
  for (std::size_t k = 0; k < n_blocks; ++k) {
    const double* xb = x + k * block;
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t j = 0;
    for (; j + 2 <= block; j += 2) {
      const float64x2_t v = vld1q_f64(xb + j);
      acc = vfmaq_f64(acc, v, v);
    }
    double b = vaddvq_f64(acc);
    for (; j < block; ++j) b += xb[j] * xb[j];
    s += w[k] * b;
  }
  return s;
}

double max_abs_neon(const double* x, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(x + i)));
  double r = vmaxvq_f64(m);
  for (; i < n; ++i) r = std::fmax(r, std::fabs(x[i]));
  return r;
}

}  // namespace

const KernelTable kNeon{dot_neon, axpy_neon, xpby_neon, bwss_neon, max_abs_neon};

}  // namespace gradplast::simd::detail
