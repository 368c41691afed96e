#pragma once

// Built-in scenarios, their property checks and result emission.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gradplast/config.hpp"
#include "gradplast/solver.hpp"

namespace gradplast {

class UnknownScenario : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunOptions {
  std::string out_dir;  ///< empty: write nothing
  std::uint64_t seed = 1;
  int snapshot_every = 0;
};

struct ScenarioReport {
  std::string name;
  std::vector<CheckResult> checks;
  /// Smallest dissipation increment over every step of every run.
  double min_dissipation_increment = 0.0;
  /// Allowed negative dissipation, 1e-10 mu |Omega|.
  double dissipation_tol = 0.0;
  std::vector<std::string> files;
  /// Scenario-specific series, e.g. (Lc, width) or (rho, gap).
  std::vector<std::vector<double>> table;
  std::vector<std::string> table_columns;

  bool passed() const;
};

const std::vector<std::string>& scenario_names();

/// Default configuration of a built-in scenario. Throws UnknownScenario.
ProblemConfig scenario_config(const std::string& name);

/// Runs a scenario with the given configuration, evaluates its checks and
/// writes CSV and snapshots to opts.out_dir. Throws UnknownScenario and
/// propagates solver errors.
ScenarioReport run_scenario(const std::string& name, const ProblemConfig& cfg,
                            const RunOptions& opts = {});

/// Diagnostics for a config file (empty means valid). Documents with a
/// `point` section are point programs; others are problem documents whose
/// `scenario` key selects the defaults (point_shear when absent).
std::vector<ConfigDiagnostic> validate_config_file(const std::string& path);

/// Runs the program of cfg from the zero state, recording every step.
std::vector<StepRecord> run_program(const Solver& solver, SolutionState& state);

/// Thickness axis of a strip (the single active axis, or y).
int strip_axis(const GridSpec& g);

/// |sym p| at the nodes along the strip axis (first node of each layer).
std::vector<double> plastic_strain_profile(const SolutionState& s, const GridSpec& g);

/// Distance from the low wall to where |sym p| first reaches 90% of its
/// mid-thickness value, interpolated linearly between nodes.
double depressed_zone_width(const std::vector<double>& profile, double h);

/// Columns: t,elastic_energy,defect_energy,hardening_energy,dissipation_cum,
/// max_gamma_p,max_omega_p,norm_skew_p
void write_step_csv(std::ostream& os, const std::vector<StepRecord>& rows);

/// Overrides one named parameter (Lc, alpha1, alpha2, rho, sigma0,
/// sigma_hat0, r1, r2, dt, n_steps). Throws ConfigError on unknown names.
void set_parameter(ProblemConfig& cfg, const std::string& name, double value);

}  // namespace gradplast
