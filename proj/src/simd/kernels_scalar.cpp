#include <cmath>

#include "gradplast/simd/kernels.hpp"

namespace gradplast::simd::detail {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby_scalar(const double* x, double b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

double bwss_scalar(const double* w, const double* x, std::size_t n_blocks, std::size_t block) {
  double s = 0.0;
  for (std::size_t k = 0; k < n_blocks; ++k) {
    double b = 0.0;
    const double* xb = x + k * block;
    for (std::size_t j = 0; j < block; ++j) b += xb[j] * xb[j];
    s += w[k] * b;
  }
  return s;
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

}  // namespace

const KernelTable kScalar{dot_scalar, axpy_scalar, xpby_scalar, bwss_scalar, max_abs_scalar};

}  // namespace gradplast::simd::detail
