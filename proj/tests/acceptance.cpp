// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "gradplast/scenarios.hpp"
#include "oracles.hpp"

using namespace gradplast;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Scenario reports are shared between criteria.
const ScenarioReport& report(const std::string& name) {
  static std::map<std::string, ScenarioReport> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, run_scenario(name, scenario_config(name))).first;
  return it->second;
}

const CheckResult* find_check(const ScenarioReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

// Closed-form conjugate against the lattice supremum on a 41 x 41 grid.
Outcome conjugacy() {
  const auto t0 = std::chrono::steady_clock::now();
  const double R = 10.0, step = 1e-3;
  int mismatches = 0, finite = 0;
  double worst_finite = -HUGE_VAL;
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 40; ++j) {
      const double A = -2.0 + 0.1 * i, B = -2.0 + 0.1 * j;
      const double sup = oracle::conjugate_grid_sup(A, B, R, step);
      if (conjugate_f(A, B).is_finite()) {
        ++finite;
        worst_finite = std::max(worst_finite, sup);
        if (sup > 1e-2) ++mismatches;
      } else {
        const double sup2 = oracle::conjugate_grid_sup(A, B, 2.0 * R, 2.0 * step);
        if (!(sup > 0.0 && sup2 > sup)) ++mismatches;
      }
    }
  }
  const double s = elapsed(t0);
  return {mismatches == 0 && s < 10.0,
          std::to_string(mismatches) + " mismatches, " + std::to_string(finite) +
              " finite points with max lattice sup " + fmt("%.2e", worst_finite) + ", " +
              fmt("%.2f s", s)};
}

// Return map on random trials: multiplier sign, yield condition, complementarity.
Outcome kkt() {
  const auto t0 = std::chrono::steady_clock::now();
  ModelParams mp{ElasticModuli::make(80000.0, 120000.0), YieldParams::make(200.0, 150.0)};
  mp.alpha1 = mp.alpha2 = 0.05;
  const double s0 = mp.yield.sigma0();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0), e(0.0, 1.0);
  double neg = 0.0, phi_max = -HUGE_VAL, comp = 0.0;
  int plastic = 0;
  for (int k = 0; k < 10000; ++k) {
    MaterialPointState st;
    st.gamma_p = 0.05 * e(rng);
    st.omega_p = 0.05 * e(rng);
    Tensor3 p0, eps, bs, bw;
    for (auto& v : p0.a) v = 1e-3 * u(rng);
    st.p = p0 - tr(p0) / 3.0 * Tensor3::identity();
    const double se = std::pow(10.0, -6.0 + 4.0 * e(rng));
    const double ss = std::pow(10.0, 3.0 * e(rng)), sw = std::pow(10.0, 3.0 * e(rng));
    for (auto& v : eps.a) v = se * u(rng);
    for (auto& v : bs.a) v = ss * u(rng);
    for (auto& v : bw.a) v = sw * u(rng);
    const auto r = return_map(st, sym(eps), sym(bs) + skew(bw), mp, 0.1);
    const Branch b = r.rate.branch == Branch::Interior
                         ? nearest_branch(reduced_coordinates(r.stress, mp.yield))
                         : r.rate.branch;
    const double phi = yield_phi(r.stress, mp.yield, b);
    const double lam = r.rate.lambda;
    plastic += lam > 0.0;
    neg = std::min(neg, lam);
    phi_max = std::max(phi_max, phi);
    comp = std::max(comp, std::abs(lam * phi));
  }
  const double s = elapsed(t0);
  const bool ok = neg >= 0.0 && phi_max <= 1e-8 * s0 && comp <= 1e-8 * s0 * s0 && s < 5.0;
  return {ok, "min lambda " + fmt("%.2e", neg) + ", max phi " + fmt("%.2e", phi_max) +
                  ", max |lambda phi| " + fmt("%.2e", comp) + ", " + std::to_string(plastic) +
                  " plastic trials, " + fmt("%.2f s", s)};
}

// Lc = 0 point shear against an independent radial return at every step.
Outcome classical_limit() {
  const ProblemConfig c = scenario_config("point_shear");
  const Solver solver(c);
  SolutionState st = solver.initial_state();
  oracle::RadialReturnState rr;
  const double mu = c.params.mu();
  double worst = 0.0;
  for (int k = 0; k < c.stepping.n_steps; ++k) {
    solver.step(st);
    std::array<double, 9> strain{};
    for (int i = 0; i < 9; ++i) strain[i] = c.load.at(st.t) * sym(c.load.grad).a[i];
    oracle::radial_return(rr, strain, mu, c.params.elastic.lambda(), c.params.yield.sigma0(),
                          mu * c.params.alpha1);
    for (double g : st.gamma_p)
      worst = std::max(worst, rr.gamma > 0.0 ? std::abs(g - rr.gamma) / rr.gamma : std::abs(g));
  }
  const double sk = norm_skew(st.p);
  return {worst <= 1e-8 && sk == 0.0 && rr.gamma > 0.0,
          "max relative gamma_p deviation " + fmt("%.2e", worst) + ", final gamma " +
              fmt("%.4e", rr.gamma) + ", |skew p| " + fmt("%g", sk)};
}

Outcome dissipation() {
  bool ok = true;
  std::string d;
  for (const auto& n : scenario_names()) {
    const ScenarioReport& r = report(n);
    ok = ok && r.min_dissipation_increment >= -r.dissipation_tol;
    d += (d.empty() ? "" : ", ") + n + " " + fmt("%.2e", r.min_dissipation_increment);
  }
  return {ok, "min increments: " + d};
}

Outcome viscous_limit() {
  const ScenarioReport& r = report("rho_continuation");
  bool mono = true;
  std::string gaps;
  for (std::size_t i = 0; i < r.table.size(); ++i) {
    gaps += (i ? " " : "") + fmt("%.2e", r.table[i][2]);
    if (i) mono = mono && r.table[i][2] < r.table[i - 1][2];
  }
  const double last = r.table.back()[2];
  return {mono && last < 0.02, "relative gaps " + gaps};
}

// Discrete de Rham identities and the curl truncation order.
Outcome discrete_complex() {
  // curl grad on a smooth vector field
  const auto g = GridSpec::make(24, 24, 24, 1.0 / 24);
  VectorField v = VectorField::zeros(g);
  for (std::size_t n = 0; n < v.values.size(); ++n) {
    const Vec3 x = g.position(n);
    v.values[n] = {std::sin(2 * x[0] + x[1]) * x[2], std::exp(x[0] * x[1]), std::cos(x[2] - x[0])};
  }
  double cg = 0.0;
  for (const auto& t : curl_field(grad_field(v)).values) cg = std::max(cg, norm(t));

  // div curl on a field whose differences are exact in binary arithmetic
  const auto ge = GridSpec::make(12, 12, 12, 0.125);
  TensorField f = TensorField::zeros(ge);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> ui(-1000, 1000);
  for (auto& t : f.values)
    for (auto& a : t.a) a = ui(rng);
  double dc_exact = 0.0;
  for (const auto& w : div_field(curl_field(f)).values) dc_exact = std::max(dc_exact, norm(w));

  // div curl on a smooth field, and the curl order
  auto field = [](const Vec3& p) {
    const double x = p[0], y = p[1], z = p[2];
    return Tensor3::from_rows({std::sin(y + z), std::cos(x * z), std::exp(0.3 * x) * y},
                              {std::sin(x) * z, std::cos(y) * x, std::sin(z + y)},
                              {x * y * z, std::sin(2 * z), std::cos(x + y)});
  };
  auto curl_exact = [](const Vec3& p) {
    const double x = p[0], y = p[1], z = p[2];
    Tensor3 c;
    c(0, 0) = std::exp(0.3 * x) + x * std::sin(x * z);
    c(0, 1) = std::cos(y + z) - 0.3 * std::exp(0.3 * x) * y;
    c(0, 2) = -z * std::sin(x * z) - std::cos(y + z);
    c(1, 0) = std::cos(z + y);
    c(1, 1) = std::sin(x);
    c(1, 2) = std::cos(y);
    c(2, 0) = -std::sin(x + y) - 2 * std::cos(2 * z);
    c(2, 1) = x * y + std::sin(x + y);
    c(2, 2) = -x * z;
    return c;
  };
  double prev = 0.0, order = HUGE_VAL, dc_smooth = 0.0;
  for (int n : {8, 16, 32, 64}) {
    const auto gs = GridSpec::make(n, n, n, 1.0 / n);
    TensorField fs = TensorField::zeros(gs);
    for (std::size_t k = 0; k < fs.size(); ++k) fs[k] = field(gs.position(k));
    const TensorField c = curl_field(fs);
    for (const auto& w : div_field(c).values) dc_smooth = std::max(dc_smooth, norm(w));
    double err = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k)
      err = std::max(err, norm(c[k] - curl_exact(gs.position(k))));
    if (prev > 0.0) order = std::min(order, std::log2(prev / err));
    prev = err;
  }
  return {cg <= 1e-10 && dc_exact == 0.0 && order >= 1.9,
          "max |curl grad| " + fmt("%.2e", cg) + ", div curl " + fmt("%g", dc_exact) +
              " in exact arithmetic (" + fmt("%.1e", dc_smooth) +
              " rounding on a smooth field), curl order " + fmt("%.3f", order)};
}

Outcome size_effect() {
  const ScenarioReport& r = report("lc_sweep");
  const CheckResult* w = find_check(r, "width_increasing");
  const CheckResult* t = find_check(r, "time_per_Lc");
  double slowest = 0.0;
  for (const auto& row : r.table) slowest = std::max(slowest, row[3]);
  return {w && t && w->passed && t->passed,
          (w ? w->detail : std::string("missing")) + ", slowest run " + fmt("%.2f s", slowest)};
}

Outcome uniqueness() {
  ProblemConfig c = scenario_config("uniqueness_twin");
  const UniquenessReport u = uniqueness_contraction_check(c, 1e-4, 7);
  return {u.metric.front() > 0.0 && u.max_relative_increase <= 0.05,
          "max relative increase " + fmt("%.2e", u.max_relative_increase) + ", metric " +
              fmt("%.3e", u.metric.front()) + " -> " + fmt("%.3e", u.metric.back())};
}

// Trace, monotone hardening variables, and rates blind to the unused force.
Outcome invariants() {
  const ProblemConfig c = scenario_config("strip_shear");
  const Solver solver(c);
  SolutionState st = solver.initial_state();
  double trmax = 0.0;
  bool mono = true;
  for (int k = 0; k < c.stepping.n_steps; ++k) {
    const auto g0 = st.gamma_p, w0 = st.omega_p;
    solver.step(st);
    for (std::size_t n = 0; n < st.p.size(); ++n) {
      trmax = std::max(trmax, std::abs(tr(st.p[n])));
      mono = mono && st.gamma_p[n] >= g0[n] && st.omega_p[n] >= w0[n];
    }
  }
  ModelParams mp{ElasticModuli::make(80000.0, 120000.0), YieldParams::make(200.0, 150.0)};
  auto bits = [](const FlowRateResult& a, const FlowRateResult& b) {
    return a.dot_p == b.dot_p && std::memcmp(&a.dot_gamma, &b.dot_gamma, sizeof(double)) == 0 &&
           std::memcmp(&a.dot_omega, &b.dot_omega, sizeof(double)) == 0 &&
           std::memcmp(&a.lambda, &b.lambda, sizeof(double)) == 0 && a.branch == b.branch;
  };
  const double a = 200.0 / std::sqrt(2.0), w = 150.0 / std::sqrt(2.0);
  const Tensor3 S1 = Tensor3::from_rows({0, a, 0}, {a, 0, 0}, {0, 0, 0});
  const Tensor3 S2 = Tensor3::from_rows({0, w, 0}, {-w, 0, 0}, {0, 0, 0});
  const auto r1 = dual_flow_rate({S1, 0.0, -10.0}, 0.3, mp);
  const auto r2 = dual_flow_rate({S1, 0.0, -77.0}, 0.3, mp);
  const auto r3 = dual_flow_rate({S2, -5.0, 0.0}, 0.3, mp);
  const auto r4 = dual_flow_rate({S2, -91.0, 0.0}, 0.3, mp);
  const bool sep = r1.branch == Branch::S1 && r3.branch == Branch::S2 && bits(r1, r2) && bits(r3, r4);
  return {trmax <= 1e-12 && mono && sep, "max |tr p| " + fmt("%.2e", trmax) +
                                             (mono ? ", gamma_p and omega_p monotone"
                                                   : ", hardening variable decreased") +
                                             (sep ? ", rates bit-identical" : ", rates differ")};
}

// Degenerate spin yield stress, and the offset domain against brute force.
Outcome degeneracy_and_offsets() {
  bool rejected = false;
  try {
    (void)YieldParams::make(200.0, 0.0);
  } catch (const std::invalid_argument&) {
    rejected = true;
  }
  bool parse_rejected = false;
  try {
    parse_problem("material:\n  sigma_hat0: 0\n", scenario_config("point_shear"));
  } catch (const ConfigInvalid& e) {
    for (const auto& d : e.diagnostics()) parse_rejected = parse_rejected || d.constraint == "sigma_hat0 > 0";
  }
  const double s0 = 200.0, sh0 = 150.0, r1 = 30.0, r2 = 20.0;
  const auto yp = YieldParams::make(s0, sh0, r1, r2);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0;
  const int trials = 400;
  for (int k = 0; k < trials; ++k) {
    const double a = 300.0 * u(rng), b = 250.0 * u(rng);
    Tensor3 S;
    S(0, 1) = (a + b) / std::sqrt(2.0);
    S(1, 0) = (a - b) / std::sqrt(2.0);
    const bool inside = elastic_domain_membership({S, 0.0, 0.0}, yp);
    const double sup = oracle::conjugate_grid_sup(a, b, 2.0, 1e-3, s0, sh0, r1, r2);
    if (inside != (sup <= 1e-9 * s0)) ++mismatches;
  }
  return {rejected && parse_rejected && mismatches == 0,
          std::string(rejected && parse_rejected ? "sigma_hat0 = 0 rejected" : "sigma_hat0 = 0 accepted") +
              ", " + std::to_string(mismatches) + "/" + std::to_string(trials) +
              " offset-domain mismatches"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"conjugacy", conjugacy},
      {"kkt", kkt},
      {"classical_limit", classical_limit},
      {"dissipation", dissipation},
      {"viscous_limit", viscous_limit},
      {"discrete_complex", discrete_complex},
      {"size_effect", size_effect},
      {"uniqueness", uniqueness},
      {"invariants", invariants},
      {"degeneracy_and_offsets", degeneracy_and_offsets},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.passed;
    std::printf("%s %s: %s\n", o.passed ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
