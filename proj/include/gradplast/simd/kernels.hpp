#pragma once

// Vector kernels used by the equilibrium CG solve, the fixed-point
// accelerator and the discrete L2 norms. Each kernel has a scalar reference
// implementation; AVX2 (x86-64) and NEON (aarch64) variants are selected at
// runtime. GRADPLAST_SIMD=scalar in the environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace gradplast::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

/// Best variant supported by the running CPU.
Isa detect();
/// Variant used by the dispatching entry points below.
Isa active();
/// Overrides the active variant; falls back to Scalar if unsupported.
void set_active(Isa isa);
bool supported(Isa isa);

struct KernelTable {
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y += a x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// y = x + b y
  void (*xpby)(const double* x, double b, double* y, std::size_t n);
  /// sum_i w[i / block] * x[i]^2
  double (*block_weighted_sumsq)(const double* w, const double* x, std::size_t n_blocks,
                                 std::size_t block);
  /// max_i |x[i]|
  double (*max_abs)(const double* x, std::size_t n);
};

const KernelTable& table(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double b, std::span<double> y);
double block_weighted_sumsq(std::span<const double> w, std::span<const double> x,
                            std::size_t block);
double max_abs(std::span<const double> x);

namespace detail {
extern const KernelTable kScalar;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable kAvx2;
#endif
#if defined(__aarch64__)
extern const KernelTable kNeon;
#endif
}  // namespace detail

}  // namespace gradplast::simd
