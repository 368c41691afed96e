#include <array>
#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "gradplast/solver.hpp"
#include "oracles.hpp"

using namespace gradplast;

namespace {

ModelParams material(double Lc, double a1, double a2) {
  ModelParams mp{ElasticModuli::make(80000.0, 120000.0), YieldParams::make(200.0, 150.0)};
  mp.Lc = Lc;
  mp.alpha1 = a1;
  mp.alpha2 = a2;
  return mp;
}

ProblemConfig point_config(double gmax, int steps) {
  ProblemConfig c{material(0.0, 0.05, 0.05), GridSpec::make(1, 1, 1, 1.0)};
  c.dirichlet_faces = 0x3f;
  c.load.grad(0, 1) = c.load.grad(1, 0) = 0.5 * gmax;
  c.stepping.dt = 1.0 / steps;
  c.stepping.n_steps = steps;
  return c;
}

ProblemConfig strip_config(double Lc, int cells, int steps) {
  ProblemConfig c{material(Lc, 4.0, 1.0), GridSpec::make(0, cells, 0, 1.0 / cells)};
  c.micro_hard_faces = c.dirichlet_faces = (1u << YLo) | (1u << YHi);
  c.load.grad(0, 1) = 6e-3;
  c.stepping.dt = 1.0 / steps;
  c.stepping.n_steps = steps;
  return c;
}

}  // namespace

TEST_CASE("configuration constraints") {
  ProblemConfig c = strip_config(0.1, 16, 4);
  CHECK_NOTHROW(c.validate());
  ProblemConfig bad = c;
  bad.params.alpha2 = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.stepping.path = FlowPath::ViscoPlastic;
  CHECK_NOTHROW(bad.validate());
  bad = c;
  bad.stepping.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.dirichlet_faces = 1u << XLo;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.fixed_point.tol_rel = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("load factor interpolation") {
  LoadProgram lp;
  lp.factor = {{0.0, 0.0}, {1.0, 2.0}, {2.0, -1.0}};
  CHECK(lp.at(-1.0) == 0.0);
  CHECK(lp.at(0.5) == doctest::Approx(1.0));
  CHECK(lp.at(1.5) == doctest::Approx(0.5));
  CHECK(lp.at(3.0) == -1.0);
}

TEST_CASE("zero state has zero energies") {
  const Solver s(strip_config(0.1, 16, 4));
  const EnergyReport e = s.energy(s.initial_state());
  CHECK(e.elastic_energy == 0.0);
  CHECK(e.defect_energy == 0.0);
  CHECK(e.hardening_energy == 0.0);
  CHECK(e.total == 0.0);
}

TEST_CASE("constant strain elastic energy") {
  ProblemConfig c = point_config(1e-3, 1);
  c.grid = GridSpec::make(2, 2, 2, 0.5);
  c.load.grad = Tensor3::from_rows({1e-4, 2e-4, 0}, {0, -1e-4, 3e-4}, {0, 0, 2e-4});
  const Solver s(c);
  SolutionState st = s.initial_state();
  st.u = s.equilibrium(st.p, 1.0);
  const Tensor3 E = sym(c.load.grad);
  CHECK(s.energy(st).elastic_energy ==
        doctest::Approx(0.5 * inner(apply_Ciso(c.params.elastic, E), E)).epsilon(1e-12));
}

TEST_CASE("step below yield is elastic") {
  ProblemConfig c = strip_config(0.1, 16, 2);
  c.load.grad(0, 1) = 1e-3;
  const Solver s(c);
  SolutionState st = s.initial_state();
  for (int k = 0; k < 2; ++k) {
    const EnergyReport e = s.step(st);
    CHECK(e.dissipation_increment == 0.0);
    CHECK(st.outer_iterations == 0);
  }
  for (const auto& t : st.p.values) CHECK(t == Tensor3::zero());
  // Energy equals the trapezoidal work of a linear program.
  CHECK(s.energy(st).total == doctest::Approx(st.work_cum).epsilon(1e-10));
}

TEST_CASE("no length scale reduces to the classical update") {
  const ProblemConfig c = point_config(1e-2, 10);
  const Solver s(c);
  SolutionState st = s.initial_state();
  oracle::RadialReturnState rr;
  const double mu = c.params.mu();
  for (int k = 0; k < c.stepping.n_steps; ++k) {
    s.step(st);
    CHECK(st.outer_iterations <= 1);
    std::array<double, 9> strain{};
    const double g = c.load.at(st.t) * c.load.grad(0, 1);
    strain[1] = strain[3] = g;
    oracle::radial_return(rr, strain, mu, c.params.elastic.lambda(), 200.0, mu * c.params.alpha1);
    for (double gp : st.gamma_p) CHECK(gp == doctest::Approx(rr.gamma).epsilon(1e-12));
  }
  CHECK(rr.gamma > 0.0);
  CHECK(norm_skew(st.p) == 0.0);
}

TEST_CASE("work balances stored energy plus dissipation") {
  const ProblemConfig c = strip_config(0.1, 32, 20);
  const Solver s(c);
  SolutionState st = s.initial_state();
  for (int k = 0; k < c.stepping.n_steps; ++k) {
    const EnergyReport e = s.step(st);
    CHECK(e.dissipation_increment >= 0.0);
  }
  const EnergyReport e = s.energy(st);
  CHECK(st.dissipation_cum > 0.0);
  CHECK(std::abs(e.total + st.dissipation_cum - st.work_cum) <= 0.01 * st.work_cum);
}

TEST_CASE("plastic state invariants on the strip") {
  const ProblemConfig c = strip_config(0.2, 32, 10);
  const Solver s(c);
  SolutionState st = s.initial_state();
  std::vector<double> g_prev = st.gamma_p, w_prev = st.omega_p;
  for (int k = 0; k < c.stepping.n_steps; ++k) {
    s.step(st);
    for (std::size_t n = 0; n < st.p.size(); ++n) {
      CHECK(std::abs(tr(st.p[n])) <= 1e-12);
      CHECK(st.gamma_p[n] >= g_prev[n]);
      CHECK(st.omega_p[n] >= w_prev[n]);
      CHECK(asymmetry(st.sigma[n]) <= 1e-12 * (1.0 + norm(st.sigma[n])));
    }
    CHECK(micro_hard_violation(st.p) <= 1e-15);
    g_prev = st.gamma_p;
    w_prev = st.omega_p;
  }
  CHECK(norm_skew(st.p) > 0.0);
}

TEST_CASE("coercivity of the stored energy on random admissible states") {
  const ProblemConfig c = strip_config(0.1, 16, 1);
  const Solver s(c);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N01;
  const std::vector<double> w = c.grid.weights();
  double qmin = HUGE_VAL;
  for (int trial = 0; trial < 50; ++trial) {
    SolutionState z = s.initial_state();
    for (auto& t : z.p.values) {
      for (double& v : t.a) v = 1e-3 * N01(rng);
      t = dev(t);
    }
    apply_micro_hard_inplace(z.p);
    double nz = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
      z.gamma_p[n] = 1e-3 * N01(rng);
      z.omega_p[n] = 1e-3 * N01(rng);
      nz += w[n] * (inner(z.p[n], z.p[n]) + z.gamma_p[n] * z.gamma_p[n] + z.omega_p[n] * z.omega_p[n]);
    }
    // u = 0 is admissible for the homogeneous Dirichlet program at t = 0.
    const EnergyReport e = s.energy(z);
    qmin = std::min(qmin, 2.0 * e.total / nz);
  }
  MESSAGE("sampled coercivity constant / mu = " << qmin / c.params.mu());
  CHECK(qmin > 0.0);
}

TEST_CASE("halving the step changes the plastic strain by less than one percent") {
  ProblemConfig a = strip_config(0.1, 32, 10);
  ProblemConfig b = a;
  b.stepping.dt *= 0.5;
  b.stepping.n_steps *= 2;
  auto run = [](const ProblemConfig& c) {
    const Solver s(c);
    SolutionState st = s.initial_state();
    for (int k = 0; k < c.stepping.n_steps; ++k) s.step(st);
    return st.gamma_p;
  };
  const std::vector<double> ga = run(a), gb = run(b);
  double diff = 0.0, ref = 0.0;
  for (std::size_t n = 0; n < ga.size(); ++n) {
    diff = std::max(diff, std::abs(ga[n] - gb[n]));
    ref = std::max(ref, std::abs(gb[n]));
  }
  CHECK(ref > 0.0);
  CHECK(diff <= 0.01 * ref);
}

TEST_CASE("twin runs") {
  ProblemConfig c = strip_config(0.1, 32, 10);
  SUBCASE("zero perturbation gives identical runs") {
    const UniquenessReport r = uniqueness_contraction_check(c, 0.0);
    for (double m : r.metric) CHECK(m == 0.0);
  }
  SUBCASE("perturbed runs contract") {
    const UniquenessReport r = uniqueness_contraction_check(c, 1e-4, 3);
    CHECK(r.metric.front() > 0.0);
    CHECK(r.max_relative_increase <= 0.05);
    CHECK(r.metric.back() < r.metric.front());
  }
}

TEST_CASE("skew plastic distortion vanishes with the length scale") {
  const ProblemConfig c = strip_config(0.0, 32, 10);
  const std::vector<LcStudyEntry> r = limit_study_Lc(c, {0.4, 0.2, 0.1, 0.05, 0.0});
  for (std::size_t k = 1; k < r.size(); ++k) CHECK(r[k].norm_skew_p < r[k - 1].norm_skew_p);
  CHECK(r.back().norm_skew_p == 0.0);
}

TEST_CASE("non-convergence reports the step and suggests a smaller step") {
  ProblemConfig c = strip_config(0.1, 16, 2);
  c.fixed_point.max_outer = 1;
  c.fixed_point.anderson_depth = 0;
  const Solver s(c);
  SolutionState st = s.initial_state();
  bool thrown = false;
  try {
    s.step(st);
    s.step(st);
  } catch (const OuterNonConvergence& e) {
    thrown = true;
    CHECK(std::string(e.what()).find("smaller dt") != std::string::npos);
  }
  CHECK(thrown);
}

TEST_CASE("threaded local updates are bit-identical") {
  ProblemConfig c = strip_config(0.1, 32, 6);
  ProblemConfig d = c;
  d.threads = 3;
  const Solver a(c), b(d);
  SolutionState sa = a.initial_state(), sb = b.initial_state();
  for (int k = 0; k < c.stepping.n_steps; ++k) {
    a.step(sa);
    b.step(sb);
  }
  CHECK(sa.gamma_p == sb.gamma_p);
  for (std::size_t n = 0; n < sa.p.size(); ++n) CHECK(sa.p[n] == sb.p[n]);
}
