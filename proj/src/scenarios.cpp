#include "gradplast/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

namespace gradplast {

namespace fs = std::filesystem;

namespace {

ModelParams base_material(double Lc, double a1, double a2) {
  ModelParams mp{ElasticModuli::make(80000.0, 120000.0), YieldParams::make(200.0, 150.0)};
  mp.Lc = Lc;
  mp.alpha1 = a1;
  mp.alpha2 = a2;
  return mp;
}

ProblemConfig point_shear_config() {
  ProblemConfig c{base_material(0.0, 0.05, 0.05), GridSpec::make(1, 1, 1, 1.0), 0u, 0u, {}, {}, {}};
  c.dirichlet_faces = 0x3f;
  c.load.grad(0, 1) = c.load.grad(1, 0) = 0.5e-2;
  c.stepping.dt = 0.05;
  c.stepping.n_steps = 20;
  return c;
}

ProblemConfig strip_shear_config() {
  const int n = 64;
  ProblemConfig c{base_material(0.1, 4.0, 1.0), GridSpec::make(0, n, 0, 1.0 / n), 0u, 0u, {}, {}, {}};
  c.micro_hard_faces = c.dirichlet_faces = (1u << YLo) | (1u << YHi);
  c.load.grad(0, 1) = 6e-3;
  c.stepping.dt = 0.05;
  c.stepping.n_steps = 20;
  return c;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string num(double v) { return fmt("%.17g", v); }

CheckResult check(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok, std::move(detail)};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Holds the output directory and collects written files.
struct Sink {
  const RunOptions& opts;
  ScenarioReport& rep;

  bool on() const { return !opts.out_dir.empty(); }

  void write(const std::string& file, const std::function<void(std::ostream&)>& fn,
             bool binary = false) {
    if (!on()) return;
    fs::create_directories(opts.out_dir);
    const std::string path = (fs::path(opts.out_dir) / file).string();
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw std::runtime_error("cannot write " + path);
    fn(os);
    rep.files.push_back(path);
  }

  void snapshot(const std::string& stem, const TensorField& p) {
    write(stem + ".csv", [&](std::ostream& os) { write_snapshot_csv(p, os); });
    write(stem + ".bin", [&](std::ostream& os) { write_snapshot_binary(p, os); }, true);
  }
};

struct Run {
  SolutionState state;
  std::vector<StepRecord> records;
  double seconds = 0.0;
};

/// Runs cfg, writing steps_<label>.csv and snapshots, and folds the
/// dissipation increments into the report.
Run execute(const ProblemConfig& cfg, const std::string& label, Sink& sink,
            const std::function<void(const SolutionState&)>& per_step = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const Solver solver(cfg);
  Run run;
  run.state = solver.initial_state();
  run.records.push_back(make_record(run.state, solver.energy(run.state)));
  const int every = sink.opts.snapshot_every;
  for (int k = 1; k <= cfg.stepping.n_steps; ++k) {
    const EnergyReport e = solver.step(run.state);
    run.records.push_back(make_record(run.state, e));
    sink.rep.min_dissipation_increment =
        std::min(sink.rep.min_dissipation_increment, e.dissipation_increment);
    if (per_step) per_step(run.state);
    if (every > 0 && k % every == 0 && k != cfg.stepping.n_steps)
      sink.snapshot("p_" + label + "_step" + std::to_string(k), run.state.p);
  }
  run.seconds = seconds_since(t0);
  sink.write("steps_" + label + ".csv",
             [&](std::ostream& os) { write_step_csv(os, run.records); });
  sink.snapshot("p_" + label + "_final", run.state.p);
  return run;
}

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

double max_trace(const TensorField& p) {
  double m = 0.0;
  for (const Tensor3& t : p.values) m = std::max(m, std::abs(tr(t)));
  return m;
}

CheckResult dissipation_check(const ScenarioReport& rep) {
  return check("dissipation", rep.min_dissipation_increment >= -rep.dissipation_tol,
               "min increment " + fmt("%.3e", rep.min_dissipation_increment) + ", tolerance -" +
                   fmt("%.3e", rep.dissipation_tol));
}

/// Classical radial return with linear isotropic hardening H, driven by the
/// homogeneous strain E.
struct ClassicalPoint {
  Tensor3 eps_p;
  double gamma = 0.0;

  void update(const Tensor3& E, const ElasticModuli& m, double sigma0, double H) {
    const Tensor3 s = apply_Ciso(m, E - eps_p);
    const Tensor3 d = dev(s);
    const double nd = norm(d);
    const double f = nd - sigma0 - H * gamma;
    if (f <= 0.0) return;
    const double dg = f / (2.0 * m.mu() + H);
    eps_p += (dg / nd) * d;
    gamma += dg;
  }
};

void write_profile(Sink& sink, const std::string& label, const SolutionState& s,
                   const GridSpec& g) {
  const int ax = strip_axis(g);
  const std::vector<double> prof = plastic_strain_profile(s, g);
  sink.write("profile_" + label + ".csv", [&](std::ostream& os) {
    os << "y,sym_p_norm,gamma_p,omega_p,p_xy,p_yx\n";
    for (std::size_t j = 0; j < prof.size(); ++j) {
      int idx[3] = {0, 0, 0};
      idx[ax] = static_cast<int>(j);
      const std::size_t n = g.index(idx[0], idx[1], idx[2]);
      os << num(j * g.h) << ',' << num(prof[j]) << ',' << num(s.gamma_p[n]) << ','
         << num(s.omega_p[n]) << ',' << num(s.p[n](0, 1)) << ',' << num(s.p[n](1, 0)) << '\n';
    }
  });
}

double thickness(const GridSpec& g) { return g.cells[strip_axis(g)] * g.h; }

void point_shear(const ProblemConfig& cfg, Sink& sink) {
  ScenarioReport& rep = sink.rep;
  ClassicalPoint ref;
  double worst = 0.0;
  const bool classical = cfg.params.Lc == 0.0 && cfg.stepping.path == FlowPath::RateIndependent;
  const Run run = execute(cfg, "point_shear", sink, [&](const SolutionState& s) {
    if (!classical) return;
    ref.update(cfg.load.at(s.t) * sym(cfg.load.grad), cfg.params.elastic,
               cfg.params.yield.sigma0(), cfg.params.mu() * cfg.params.alpha1);
    for (double g : s.gamma_p) {
      const double scale = std::max(std::abs(ref.gamma), 1e-300);
      worst = std::max(worst, ref.gamma == 0.0 ? std::abs(g) : std::abs(g - ref.gamma) / scale);
    }
  });
  rep.checks.push_back(dissipation_check(rep));
  if (classical) {
    rep.checks.push_back(check("classical_match", worst <= 1e-8,
                               "max relative gamma_p deviation " + fmt("%.3e", worst)));
    const double sk = norm_skew(run.state.p);
    rep.checks.push_back(check("skew_zero", sk == 0.0, "|skew p| = " + fmt("%.3e", sk)));
  }
  const double trp = max_trace(run.state.p);
  rep.checks.push_back(check("trace_free", trp <= 1e-12, "max |tr p| " + fmt("%.3e", trp)));
}

void strip_shear(const ProblemConfig& cfg, Sink& sink) {
  ScenarioReport& rep = sink.rep;
  double trp = 0.0, hard = 0.0;
  const Run run = execute(cfg, "strip_shear", sink, [&](const SolutionState& s) {
    trp = std::max(trp, max_trace(s.p));
    hard = std::max(hard, micro_hard_violation(s.p));
  });
  write_profile(sink, "strip_shear", run.state, cfg.grid);
  const EnergyReport e = Solver(cfg).energy(run.state);
  const double W = run.state.work_cum;
  const double gap = std::abs(e.total + run.state.dissipation_cum - W);
  const double width =
      depressed_zone_width(plastic_strain_profile(run.state, cfg.grid), cfg.grid.h);
  rep.table_columns = {"Lc", "width", "norm_skew_p", "seconds"};
  rep.table.push_back({cfg.params.Lc, width, norm_skew(run.state.p), run.seconds});
  rep.checks.push_back(dissipation_check(rep));
  rep.checks.push_back(check("trace_free", trp <= 1e-12, "max |tr p| " + fmt("%.3e", trp)));
  rep.checks.push_back(
      check("micro_hard", hard <= 1e-12, "max |p x n| on hard faces " + fmt("%.3e", hard)));
  rep.checks.push_back(check("energy_balance", W > 0.0 && gap <= 0.01 * W,
                             "|E + D - W| / W = " + fmt("%.3e", W > 0.0 ? gap / W : 0.0)));
}

void lc_sweep(const ProblemConfig& cfg, Sink& sink) {
  ScenarioReport& rep = sink.rep;
  const double H = thickness(cfg.grid);
  const double factors[] = {0.4, 0.2, 0.1, 0.05, 0.0};
  rep.table_columns = {"Lc", "width", "norm_skew_p", "seconds"};
  for (double f : factors) {
    ProblemConfig c = cfg;
    c.params.Lc = f * H;
    const Run run = execute(c, "Lc" + fmt("%g", f), sink);
    write_profile(sink, "Lc" + fmt("%g", f), run.state, c.grid);
    const double w = depressed_zone_width(plastic_strain_profile(run.state, c.grid), c.grid.h);
    rep.table.push_back({c.params.Lc, w, norm_skew(run.state.p), run.seconds});
  }
  // Rows are ordered by decreasing Lc.
  bool width_ok = true, skew_ok = true, time_ok = true;
  std::string widths, skews;
  for (std::size_t i = 0; i < rep.table.size(); ++i) {
    const auto& r = rep.table[i];
    if (r[0] > 0.0) widths += (widths.empty() ? "" : " ") + fmt("%.4g", r[1]);
    skews += (skews.empty() ? "" : " ") + fmt("%.3g", r[2]);
    time_ok = time_ok && r[3] < 60.0;
    if (i == 0) continue;
    const auto& q = rep.table[i - 1];
    if (r[0] > 0.0) width_ok = width_ok && r[1] < q[1];
    skew_ok = skew_ok && r[2] <= q[2];
  }
  const double last_skew = rep.table.back()[2];
  rep.checks.push_back(dissipation_check(rep));
  rep.checks.push_back(check("width_increasing", width_ok, "widths (Lc descending) " + widths));
  rep.checks.push_back(check("skew_vanishing", skew_ok && last_skew == 0.0,
                             "|skew p| (Lc descending) " + skews));
  rep.checks.push_back(check("time_per_Lc", time_ok, "each run under 60 s"));
}

void rho_continuation(const ProblemConfig& cfg, Sink& sink) {
  ScenarioReport& rep = sink.rep;
  ProblemConfig ri = cfg;
  ri.stepping.path = FlowPath::RateIndependent;
  const Run ref = execute(ri, "rate_independent", sink);
  const double g_ref = max_of(ref.state.gamma_p);
  const double T = cfg.stepping.dt * cfg.stepping.n_steps;
  const double mu = cfg.params.mu();
  rep.table_columns = {"rho", "gamma_p", "relative_gap"};
  for (double m : {1e-1, 1e-2, 1e-3, 1e-4}) {
    ProblemConfig c = cfg;
    c.stepping.path = FlowPath::ViscoPlastic;
    c.stepping.rho_schedule.clear();
    c.params.rho = m * mu * T;
    const Run run = execute(c, "rho" + fmt("%g", m), sink);
    const double g = max_of(run.state.gamma_p);
    rep.table.push_back({c.params.rho, g, g_ref > 0.0 ? std::abs(g - g_ref) / g_ref : HUGE_VAL});
  }
  bool mono = true;
  std::string gaps;
  for (std::size_t i = 0; i < rep.table.size(); ++i) {
    gaps += (i ? " " : "") + fmt("%.3e", rep.table[i][2]);
    if (i) mono = mono && rep.table[i][2] < rep.table[i - 1][2];
  }
  const double last = rep.table.back()[2];
  rep.checks.push_back(dissipation_check(rep));
  rep.checks.push_back(check("monotone_convergence", mono, "gaps " + gaps));
  rep.checks.push_back(check("final_gap", last < 0.02, "final gap " + fmt("%.3e", last)));
}

void uniqueness_twin(const ProblemConfig& cfg, Sink& sink) {
  ScenarioReport& rep = sink.rep;
  const Solver solver(cfg);
  SolutionState a = solver.initial_state();
  const TensorField p0 = twin_perturbation(cfg, 1e-4, sink.opts.seed);
  SolutionState b = solver.initial_state(&p0);
  rep.table_columns = {"t", "metric"};
  rep.table.push_back({a.t, twin_metric(a, b, cfg)});
  for (int k = 0; k < cfg.stepping.n_steps; ++k) {
    for (SolutionState* s : {&a, &b}) {
      const EnergyReport e = solver.step(*s);
      rep.min_dissipation_increment = std::min(rep.min_dissipation_increment, e.dissipation_increment);
    }
    rep.table.push_back({a.t, twin_metric(a, b, cfg)});
  }
  double lo = HUGE_VAL, inc = 0.0;
  for (const auto& r : rep.table) {
    lo = std::min(lo, r[1]);
    if (lo > 0.0) inc = std::max(inc, r[1] / lo - 1.0);
  }
  sink.write("twin_metric.csv", [&](std::ostream& os) {
    os << "t,metric\n";
    for (const auto& r : rep.table) os << num(r[0]) << ',' << num(r[1]) << '\n';
  });
  rep.checks.push_back(dissipation_check(rep));
  rep.checks.push_back(check("contraction", rep.table.front()[1] > 0.0 && inc <= 0.05,
                             "max relative increase " + fmt("%.3e", inc)));
}

}  // namespace

bool ScenarioReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"point_shear", "strip_shear", "lc_sweep",
                                                 "rho_continuation", "uniqueness_twin"};
  return names;
}

ProblemConfig scenario_config(const std::string& name) {
  if (name == "point_shear" || name == "rho_continuation") return point_shear_config();
  if (name == "strip_shear" || name == "lc_sweep" || name == "uniqueness_twin")
    return strip_shear_config();
  throw UnknownScenario("unknown scenario '" + name + "'");
}

ScenarioReport run_scenario(const std::string& name, const ProblemConfig& cfg,
                            const RunOptions& opts) {
  static const std::vector<std::pair<std::string, void (*)(const ProblemConfig&, Sink&)>> table =
      {{"point_shear", point_shear},
       {"strip_shear", strip_shear},
       {"lc_sweep", lc_sweep},
       {"rho_continuation", rho_continuation},
       {"uniqueness_twin", uniqueness_twin}};
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const auto& e) { return e.first == name; });
  if (it == table.end()) throw UnknownScenario("unknown scenario '" + name + "'");
  cfg.validate();
  ScenarioReport rep;
  rep.name = name;
  rep.dissipation_tol = 1e-10 * cfg.params.mu() * cfg.grid.volume();
  Sink sink{opts, rep};
  it->second(cfg, sink);
  return rep;
}

std::vector<ConfigDiagnostic> validate_config_file(const std::string& path) {
  try {
    const std::string text = read_config_file(path);
    if (is_point_document(text)) {
      parse_point(text);
      return {};
    }
    const std::string name = peek_scenario(text);
    try {
      parse_problem(text, scenario_config(name.empty() ? "point_shear" : name));
    } catch (const UnknownScenario& e) {
      return {{"scenario", e.what(), 0}};
    }
    return {};
  } catch (const ConfigInvalid& e) {
    return e.diagnostics();
  }
}

int strip_axis(const GridSpec& g) {
  if (g.dims() == 1)
    for (int a = 0; a < 3; ++a)
      if (g.active(a)) return a;
  return 1;
}

std::vector<double> plastic_strain_profile(const SolutionState& s, const GridSpec& g) {
  const int ax = strip_axis(g);
  std::vector<double> out(static_cast<std::size_t>(g.nodes(ax)));
  for (int j = 0; j < g.nodes(ax); ++j) {
    int idx[3] = {0, 0, 0};
    idx[ax] = j;
    out[static_cast<std::size_t>(j)] = norm(sym(s.p[g.index(idx[0], idx[1], idx[2])]));
  }
  return out;
}

double depressed_zone_width(const std::vector<double>& profile, double h) {
  if (profile.size() < 3) return 0.0;
  const double mid = profile[profile.size() / 2];
  if (!(mid > 0.0)) return 0.0;
  const double target = 0.9 * mid;
  if (profile[0] >= target) return 0.0;
  for (std::size_t j = 1; j <= profile.size() / 2; ++j) {
    const double a = profile[j - 1], b = profile[j];
    if (b >= target) return h * (static_cast<double>(j - 1) + (target - a) / (b - a));
  }
  return h * static_cast<double>(profile.size() / 2);
}

void write_step_csv(std::ostream& os, const std::vector<StepRecord>& rows) {
  os << "t,elastic_energy,defect_energy,hardening_energy,dissipation_cum,max_gamma_p,"
        "max_omega_p,norm_skew_p\n";
  for (const StepRecord& r : rows)
    os << num(r.t) << ',' << num(r.energy.elastic_energy) << ',' << num(r.energy.defect_energy)
       << ',' << num(r.energy.hardening_energy) << ',' << num(r.dissipation_cum) << ','
       << num(r.max_gamma_p) << ',' << num(r.max_omega_p) << ',' << num(r.norm_skew_p) << '\n';
}

std::vector<StepRecord> run_program(const Solver& solver, SolutionState& state) {
  std::vector<StepRecord> out;
  out.push_back(make_record(state, solver.energy(state)));
  for (int k = 0; k < solver.config().stepping.n_steps; ++k)
    out.push_back(make_record(state, solver.step(state)));
  return out;
}

void set_parameter(ProblemConfig& cfg, const std::string& name, double value) {
  ModelParams& mp = cfg.params;
  const YieldParams& y = mp.yield;
  if (name == "Lc") mp.Lc = value;
  else if (name == "alpha1") mp.alpha1 = value;
  else if (name == "alpha2") mp.alpha2 = value;
  else if (name == "rho") mp.rho = value;
  else if (name == "sigma0") mp.yield = YieldParams::make(value, y.sigma_hat0(), y.r1(), y.r2());
  else if (name == "sigma_hat0") mp.yield = YieldParams::make(y.sigma0(), value, y.r1(), y.r2());
  else if (name == "r1") mp.yield = YieldParams::make(y.sigma0(), y.sigma_hat0(), value, y.r2());
  else if (name == "r2") mp.yield = YieldParams::make(y.sigma0(), y.sigma_hat0(), y.r1(), value);
  else if (name == "dt") cfg.stepping.dt = value;
  else if (name == "n_steps") cfg.stepping.n_steps = static_cast<int>(value);
  else throw ConfigError("unknown parameter '" + name + "'");
}

}  // namespace gradplast
