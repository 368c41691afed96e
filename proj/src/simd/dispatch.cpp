#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

#include "gradplast/simd/kernels.hpp"

namespace gradplast::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "?";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect() {
  if (supported(Isa::Avx2)) return Isa::Avx2;
  if (supported(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

namespace {

Isa initial() {
  if (const char* env = std::getenv("GRADPLAST_SIMD"); env && std::string(env) == "scalar")
    return Isa::Scalar;
  return detect();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial()};
  return isa;
}

}  // namespace

Isa active() { return current().load(std::memory_order_relaxed); }

void set_active(Isa isa) { current().store(supported(isa) ? isa : Isa::Scalar); }

const KernelTable& table(Isa isa) {
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2: return detail::kAvx2;
#endif
#if defined(__aarch64__)
    case Isa::Neon: return detail::kNeon;
#endif
    default: return detail::kScalar;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return table(active()).dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  table(active()).axpy(a, x.data(), y.data(), x.size());
}

void xpby(std::span<const double> x, double b, std::span<double> y) {
  assert(x.size() == y.size());
  table(active()).xpby(x.data(), b, y.data(), x.size());
}

double block_weighted_sumsq(std::span<const double> w, std::span<const double> x,
                            std::size_t block) {
  assert(w.size() * block == x.size());
  return table(active()).block_weighted_sumsq(w.data(), x.data(), w.size(), block);
}

double max_abs(std::span<const double> x) { return table(active()).max_abs(x.data(), x.size()); }

}  // namespace gradplast::simd
