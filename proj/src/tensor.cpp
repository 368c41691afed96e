#include "gradplast/tensor.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gradplast {

Tensor3 transpose(const Tensor3& x) {
  Tensor3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = x(j, i);
  return t;
}

Tensor3 sym(const Tensor3& x) {
  Tensor3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = 0.5 * (x(i, j) + x(j, i));
  return t;
}

Tensor3 skew(const Tensor3& x) {
  Tensor3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = 0.5 * (x(i, j) - x(j, i));
  return t;
}

double tr(const Tensor3& x) { return x(0, 0) + x(1, 1) + x(2, 2); }

Tensor3 dev(const Tensor3& x) {
  Tensor3 t = x;
  const double m = tr(x) / 3.0;
  t(0, 0) -= m;
  t(1, 1) -= m;
  t(2, 2) -= m;
  return t;
}

double inner(const Tensor3& a, const Tensor3& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < 9; ++k) s += a.a[k] * b.a[k];
  return s;
}

double norm(const Tensor3& x) { return std::sqrt(inner(x, x)); }

Tensor3 matmul(const Tensor3& a, const Tensor3& b) {
  Tensor3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      t(i, j) = s;
    }
  return t;
}

Tensor3 outer(const Vec3& u, const Vec3& v) {
  Tensor3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = u[i] * v[j];
  return t;
}

double dot(const Vec3& u, const Vec3& v) { return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]; }

Vec3 cross(const Vec3& u, const Vec3& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

double asymmetry(const Tensor3& x) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) worst = std::max(worst, std::abs(x(i, j) - x(j, i)));
  return worst / std::max(1.0, norm(x));
}

ElasticModuli ElasticModuli::make(double mu, double lambda) {
  if (!(mu > 0.0))
    throw std::invalid_argument("elastic moduli: mu must be positive, got " + std::to_string(mu));
  if (!(3.0 * lambda + 2.0 * mu > 0.0))
    throw std::invalid_argument("elastic moduli: 3*lambda + 2*mu must be positive");
  return ElasticModuli(mu, lambda);
}

Tensor3 apply_Ciso(const ElasticModuli& m, const Tensor3& x) {
  Tensor3 s = sym(x);
  const double t = tr(x);
  s *= 2.0 * m.mu();
  s(0, 0) += m.lambda() * t;
  s(1, 1) += m.lambda() * t;
  s(2, 2) += m.lambda() * t;
  return s;
}

Tensor3 apply_Ciso_inverse(const ElasticModuli& m, const Tensor3& s) {
  if (asymmetry(s) > 1e-12)
    throw std::invalid_argument("apply_Ciso_inverse: argument is not symmetric");
  Tensor3 e = dev(sym(s)) / (2.0 * m.mu());
  const double vol = tr(s) / (9.0 * m.kappa());
  e(0, 0) += vol;
  e(1, 1) += vol;
  e(2, 2) += vol;
  return e;
}

}  // namespace gradplast
