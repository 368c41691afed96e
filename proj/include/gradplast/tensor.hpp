#pragma once

// Small dense 3x3 tensor algebra and the isotropic elasticity tensor.

#include <array>
#include <cmath>
#include <cstddef>

namespace gradplast {

using Vec3 = std::array<double, 3>;

/// Dense 3x3 real tensor, row-major. Rows are addressable as 3-vectors so
/// row-wise operators (Curl, Div) can be written directly.
struct Tensor3 {
  std::array<double, 9> a{};

  constexpr double& operator()(int i, int j) { return a[3 * i + j]; }
  constexpr double operator()(int i, int j) const { return a[3 * i + j]; }

  Vec3 row(int i) const { return {a[3 * i], a[3 * i + 1], a[3 * i + 2]}; }
  void set_row(int i, const Vec3& v) {
    a[3 * i] = v[0];
    a[3 * i + 1] = v[1];
    a[3 * i + 2] = v[2];
  }

  static constexpr Tensor3 zero() { return {}; }
  static constexpr Tensor3 identity() {
    Tensor3 t;
    t.a[0] = t.a[4] = t.a[8] = 1.0;
    return t;
  }
  static Tensor3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
    Tensor3 t;
    t.set_row(0, r0);
    t.set_row(1, r1);
    t.set_row(2, r2);
    return t;
  }

  Tensor3& operator+=(const Tensor3& o) {
    for (std::size_t k = 0; k < 9; ++k) a[k] += o.a[k];
    return *this;
  }
  Tensor3& operator-=(const Tensor3& o) {
    for (std::size_t k = 0; k < 9; ++k) a[k] -= o.a[k];
    return *this;
  }
  Tensor3& operator*=(double s) {
    for (auto& v : a) v *= s;
    return *this;
  }

  friend Tensor3 operator+(Tensor3 x, const Tensor3& y) { return x += y; }
  friend Tensor3 operator-(Tensor3 x, const Tensor3& y) { return x -= y; }
  friend Tensor3 operator*(double s, Tensor3 x) { return x *= s; }
  friend Tensor3 operator*(Tensor3 x, double s) { return x *= s; }
  friend Tensor3 operator/(Tensor3 x, double s) { return x *= (1.0 / s); }
  friend Tensor3 operator-(Tensor3 x) { return x *= -1.0; }
  friend bool operator==(const Tensor3&, const Tensor3&) = default;
};

Tensor3 transpose(const Tensor3& x);
Tensor3 sym(const Tensor3& x);
Tensor3 skew(const Tensor3& x);
Tensor3 dev(const Tensor3& x);
double tr(const Tensor3& x);
/// Frobenius inner product <A,B> = tr(A B^T).
double inner(const Tensor3& a, const Tensor3& b);
/// Frobenius norm.
double norm(const Tensor3& x);
Tensor3 matmul(const Tensor3& a, const Tensor3& b);
Tensor3 outer(const Vec3& u, const Vec3& v);

double dot(const Vec3& u, const Vec3& v);
Vec3 cross(const Vec3& u, const Vec3& v);
double norm(const Vec3& v);

/// Largest absolute entry of X - X^T, relative to max(1, |X|).
double asymmetry(const Tensor3& x);

/// Isotropic moduli. Constructed through make(), which checks mu > 0 and
/// 3 lambda + 2 mu > 0; kappa is derived.
class ElasticModuli {
 public:
  static ElasticModuli make(double mu, double lambda);

  double mu() const { return mu_; }
  double lambda() const { return lambda_; }
  double kappa() const { return lambda_ + 2.0 * mu_ / 3.0; }
  /// Ellipticity constant m0 = min(2 mu, 3 lambda + 2 mu) on Sym(3).
  double m0() const { return std::fmin(2.0 * mu_, 3.0 * lambda_ + 2.0 * mu_); }

 private:
  ElasticModuli(double mu, double lambda) : mu_(mu), lambda_(lambda) {}
  double mu_;
  double lambda_;
};

/// C X = 2 mu sym X + lambda tr(X) 1. Skew parts are annihilated.
Tensor3 apply_Ciso(const ElasticModuli& m, const Tensor3& x);

/// Inverse of C on Sym(3): dev S / (2 mu) + tr S / (9 kappa) 1.
/// Throws std::invalid_argument if S is not symmetric to 1e-12 relative.
Tensor3 apply_Ciso_inverse(const ElasticModuli& m, const Tensor3& s);

}  // namespace gradplast
