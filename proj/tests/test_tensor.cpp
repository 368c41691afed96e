#include <random>

#include "doctest.h"
#include "gradplast/tensor.hpp"
#include "oracles.hpp"

using namespace gradplast;

namespace {

Tensor3 random_tensor(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Tensor3 t;
  for (auto& v : t.a) v = u(rng);
  return t;
}

}  // namespace

TEST_CASE("decompositions of the identity") {
  const Tensor3 I = Tensor3::identity();
  CHECK(norm(dev(I)) == doctest::Approx(0.0));
  CHECK(tr(I) == 3.0);
}

TEST_CASE("single off-diagonal entry") {
  const Tensor3 X = Tensor3::from_rows({0, 1, 0}, {0, 0, 0}, {0, 0, 0});
  const Tensor3 S = sym(X);
  CHECK(S(0, 1) == 0.5);
  CHECK(S(1, 0) == 0.5);
  CHECK(norm(X) == 1.0);
}

TEST_CASE("split identities on random tensors") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    const Tensor3 X = random_tensor(rng, 3.0);
    const Tensor3 Y = random_tensor(rng, 3.0);
    CHECK(norm(sym(X) + skew(X) - X) <= 1e-15 * (1.0 + norm(X)));
    CHECK(std::abs(tr(dev(X))) <= 1e-14);
    CHECK(std::abs(inner(sym(X), skew(Y))) <= 1e-13);
    CHECK(norm(X) * norm(X) == doctest::Approx(inner(X, X)).epsilon(1e-14));
    CHECK(inner(X, Y) == doctest::Approx(tr(matmul(X, transpose(Y)))).epsilon(1e-13));
    CHECK(norm(dev(X) - (X - tr(X) / 3.0 * Tensor3::identity())) <= 1e-14);
  }
}

TEST_CASE("vector helpers") {
  const Vec3 e1{1, 0, 0}, e2{0, 1, 0};
  const Vec3 c = cross(e1, e2);
  CHECK(c[2] == 1.0);
  CHECK(dot(e1, e2) == 0.0);
  const Tensor3 o = outer(e1, e2);
  CHECK(o(0, 1) == 1.0);
  CHECK(norm(Vec3{3, 4, 0}) == 5.0);
}

TEST_CASE("moduli validation") {
  CHECK_THROWS(ElasticModuli::make(0.0, 1.0));
  CHECK_THROWS(ElasticModuli::make(1.0, -1.0));  // 3 lambda + 2 mu = -1
  const auto m = ElasticModuli::make(80.0, 120.0);
  CHECK(m.kappa() == doctest::Approx(120.0 + 160.0 / 3.0));
}

TEST_CASE("apply_Ciso direct evaluations") {
  const auto m = ElasticModuli::make(1.0, 1.0);
  CHECK(norm(apply_Ciso(m, Tensor3::zero())) == 0.0);
  CHECK(norm(apply_Ciso(m, Tensor3::identity()) - 5.0 * Tensor3::identity()) <= 1e-15);
  std::mt19937_64 rng(3);
  const Tensor3 X = random_tensor(rng);
  CHECK(norm(apply_Ciso(m, X) - apply_Ciso(m, sym(X))) <= 1e-15);
}

TEST_CASE("apply_Ciso ellipticity against the Mandel eigenvalue oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mu_d(0.1, 10.0), lam_d(-0.6, 5.0);
  for (int k = 0; k < 100; ++k) {
    const double mu = mu_d(rng);
    const double lam = lam_d(rng) * mu;
    const auto m = ElasticModuli::make(mu, lam);
    const double emin = oracle::min_eig_isotropic(mu, lam);
    CHECK(m.m0() == doctest::Approx(emin).epsilon(1e-10));
    const Tensor3 S = sym(random_tensor(rng));
    CHECK(inner(S, apply_Ciso(m, S)) >= emin * inner(S, S) - 1e-12);
  }
}

TEST_CASE("apply_Ciso_inverse round trip") {
  const auto m1 = ElasticModuli::make(1.0, 1.0);
  CHECK(norm(apply_Ciso_inverse(m1, 5.0 * Tensor3::identity()) - Tensor3::identity()) <= 1e-15);
  const auto m = ElasticModuli::make(80000.0, 120000.0);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const Tensor3 S = sym(random_tensor(rng, 500.0));
    const Tensor3 back = apply_Ciso(m, apply_Ciso_inverse(m, S));
    CHECK(norm(back - S) <= 1e-12 * norm(S));
    const Tensor3 D = dev(S);
    CHECK(norm(apply_Ciso_inverse(m, D) - D / (2.0 * m.mu())) <= 1e-15 * norm(D));
  }
  CHECK_THROWS_AS(apply_Ciso_inverse(m, Tensor3::from_rows({0, 1, 0}, {0, 0, 0}, {0, 0, 0})),
                  std::invalid_argument);
}
