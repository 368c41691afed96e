#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "doctest.h"
#include "gradplast/fe.hpp"
#include "gradplast/flow_rule.hpp"

using namespace gradplast;

namespace {

const ElasticModuli kMod = ElasticModuli::make(80000.0, 120000.0);

DirichletData boundary_data(const GridSpec& g, const std::function<Vec3(const Vec3&)>& u) {
  DirichletData bc;
  bc.fixed.assign(3 * g.node_count(), 0);
  bc.value.assign(3 * g.node_count(), 0.0);
  const BoundaryMask m = BoundaryMask::make(g, 0);
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    if (m.faces(n) == 0) continue;
    const Vec3 v = u(g.position(n));
    for (int i = 0; i < 3; ++i) {
      bc.fixed[3 * n + i] = 1;
      bc.value[3 * n + i] = v[i];
    }
  }
  return bc;
}

double nodal_error(const GridSpec& g, const std::vector<double>& u,
                   const std::function<Vec3(const Vec3&)>& exact) {
  double e = 0.0;
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const Vec3 v = exact(g.position(n));
    for (int i = 0; i < 3; ++i) e = std::max(e, std::abs(u[3 * n + i] - v[i]));
  }
  return e;
}

}  // namespace

TEST_CASE("affine boundary data reproduces the affine field") {
  const GridSpec g = GridSpec::make(4, 3, 2, 0.25);
  const Tensor3 G = Tensor3::from_rows({1e-3, 2e-3, -1e-3}, {0.5e-3, -2e-3, 1e-3}, {0, 3e-3, 1e-3});
  auto exact = [&](const Vec3& x) {
    Vec3 v{0, 0, 0};
    for (int i = 0; i < 3; ++i) v[i] = dot(G.row(i), x);
    return v;
  };
  ElasticityOperator K(g, kMod);
  const TensorField p = TensorField::zeros(g);
  std::vector<double> u, f(K.dofs(), 0.0);
  const CgResult r = K.solve(p, f, boundary_data(g, exact), u, 1e-13, 1000);
  CHECK(r.converged);
  CHECK(nodal_error(g, u, exact) < 1e-14);
  // Constant stress: the recovered elastic strain equals sym G everywhere.
  const TensorField e = K.elastic_strain_nodal(u, p);
  for (std::size_t n = 0; n < e.size(); ++n) CHECK(norm(e[n] - sym(G)) < 1e-12);
  CHECK(K.elastic_energy(u, p) ==
        doctest::Approx(0.5 * inner(apply_Ciso(kMod, sym(G)), sym(G)) * g.volume()).epsilon(1e-12));
}

TEST_CASE("manufactured quadratic displacement converges at second order") {
  const double mu = kMod.mu(), lam = kMod.lambda();
  auto exact = [](const Vec3& x) { return Vec3{1e-3 * (x[0] * x[0] + x[1] * x[1]), 1e-3 * x[0] * x[1], 0.0}; };
  // f = -(mu Lap u + (lambda + mu) grad div u)
  const Vec3 f{-1e-3 * (4.0 * mu + 3.0 * (lam + mu)), 0.0, 0.0};
  double err[2];
  int k = 0;
  for (int n : {8, 16}) {
    const GridSpec g = GridSpec::make(n, n, 0, 1.0 / n);
    ElasticityOperator K(g, kMod);
    std::vector<double> u;
    const std::vector<double> load = K.body_load(std::vector<Vec3>(g.node_count(), f));
    const CgResult r = K.solve(TensorField::zeros(g), load, boundary_data(g, exact), u, 1e-13, 5000);
    CHECK(r.converged);
    err[k++] = nodal_error(g, u, exact);
  }
  CHECK(err[0] < 1e-4);
  CHECK(err[1] <= err[0] / 3.5 + 1e-15);
}

TEST_CASE("equilibrium residual vanishes on free dofs") {
  const GridSpec g = GridSpec::make(5, 4, 0, 0.2);
  ElasticityOperator K(g, kMod);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1e-3, 1e-3);
  TensorField p = TensorField::zeros(g);
  for (auto& t : p.values) {
    for (double& v : t.a) v = U(rng);
    t = dev(t);
  }
  auto zero = [](const Vec3&) { return Vec3{0, 0, 0}; };
  const DirichletData bc = boundary_data(g, zero);
  std::vector<double> u, ext(K.dofs(), 0.0);
  const CgResult r = K.solve(p, ext, bc, u, 1e-12, 5000);
  CHECK(r.converged);
  const std::vector<double> fi = K.internal_force(u, p);
  const std::vector<double> fp = K.plastic_load(p);
  double res = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < fi.size(); ++i) {
    scale = std::max(scale, std::abs(fp[i]));
    if (!bc.fixed[i]) res = std::max(res, std::abs(fi[i]));
  }
  CHECK(res <= 1e-10 * scale);
  // Energy is stationary: the plastic field with the computed u has lower
  // elastic energy than with a perturbed u.
  std::vector<double> v = u;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!bc.fixed[i]) v[i] += 1e-6;
  CHECK(K.elastic_energy(v, p) > K.elastic_energy(u, p));
}

TEST_CASE("constrained return keeps the boundary condition and the KKT conditions") {
  ModelParams mp{kMod, YieldParams::make(200.0, 150.0)};
  mp.Lc = 0.1;
  mp.alpha1 = mp.alpha2 = 0.05;
  const Vec3 n{0.0, 1.0, 0.0};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    MaterialPointState st;
    st.p = outer(Vec3{1e-3 * U(rng), 0.0, 1e-3 * U(rng)}, n);
    st.gamma_p = st.omega_p = 1e-3 * std::abs(U(rng));
    Tensor3 strain;
    for (double& v : strain.a) v = 1e-2 * U(rng);
    strain = sym(strain);
    Tensor3 back;
    for (double& v : back.a) v = 100.0 * U(rng);
    ReturnMapOptions opts;
    opts.prox_shift = 1000.0 * std::abs(U(rng));
    const ReturnMapResult r = constrained_return_map(st, strain, back, n, mp, 0.1, false, opts);
    CHECK(constrained_kkt_residual(r, n, mp) <= 1e-8 * 200.0);
    CHECK(std::abs(tr(r.state.p)) <= 1e-18);
    const Tensor3 pn = r.state.p;
    for (int i = 0; i < 3; ++i) CHECK(norm(cross(pn.row(i), n)) <= 1e-18);
    CHECK(r.state.gamma_p >= st.gamma_p);
    CHECK(r.state.omega_p == r.state.gamma_p - st.gamma_p + st.omega_p);
    const double d = incremental_dissipation(r.stress, r.state.p - st.p, r.state.gamma_p - st.gamma_p,
                                             r.state.omega_p - st.omega_p);
    CHECK(d >= -1e-12);
  }
}

TEST_CASE("viscous constrained update approaches the rate-independent one") {
  ModelParams mp{kMod, YieldParams::make(200.0, 150.0)};
  mp.alpha1 = mp.alpha2 = 0.05;
  const Vec3 n{0.0, -1.0, 0.0};
  const Tensor3 strain = Tensor3::from_rows({0, 0, 0}, {0, 0, 5e-3}, {0, 5e-3, 0});
  const MaterialPointState st;
  const ReturnMapResult ri = constrained_return_map(st, strain, Tensor3::zero(), n, mp, 1.0, false);
  CHECK(ri.state.gamma_p > 0.0);
  double prev = 0.0;
  for (double rho : {1e3, 1e1, 1e-1, 1e-3}) {
    mp.rho = rho;
    const ReturnMapResult vp = constrained_return_map(st, strain, Tensor3::zero(), n, mp, 1.0, true);
    CHECK(vp.state.gamma_p > prev);
    CHECK(vp.state.gamma_p <= ri.state.gamma_p * (1 + 1e-12));
    prev = vp.state.gamma_p;
  }
  CHECK(prev == doctest::Approx(ri.state.gamma_p).epsilon(1e-3));
}
