#pragma once

// Quasi-static incremental solver: equilibrium (Q1 finite elements) coupled
// to the pointwise plastic evolution through a fixed-point iteration on the
// nodal plastic distortion, with energy and uniqueness audits.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gradplast/fe.hpp"
#include "gradplast/field.hpp"
#include "gradplast/flow_rule.hpp"

namespace gradplast {

class ConfigError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The fixed-point loop hit max_outer without meeting the tolerance.
class OuterNonConvergence : public std::runtime_error {
 public:
  OuterNonConvergence(int step, int iterations, double residual)
      : std::runtime_error("fixed point did not converge at step " + std::to_string(step) +
                           " after " + std::to_string(iterations) + " iterations (residual " +
                           std::to_string(residual) + "); try a smaller dt"),
        step_(step),
        iterations_(iterations),
        residual_(residual) {}
  int step() const { return step_; }
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int step_;
  int iterations_;
  double residual_;
};

/// Boundary displacement u = s(t) G x on the Dirichlet faces and body force
/// s(t) f, with s piecewise linear through the (t, s) table.
struct LoadProgram {
  Tensor3 grad;
  Vec3 body_force{0.0, 0.0, 0.0};
  std::vector<std::pair<double, double>> factor{{0.0, 0.0}, {1.0, 1.0}};

  double at(double t) const;
};

enum class FlowPath { RateIndependent, ViscoPlastic };

struct Stepping {
  double dt = 0.1;
  int n_steps = 10;
  FlowPath path = FlowPath::RateIndependent;
  /// Viscosity per step; step k uses rho_schedule[min(k, size - 1)].
  /// Empty means ModelParams::rho.
  std::vector<double> rho_schedule;
};

struct FixedPointOptions {
  int max_outer = 5000;
  double tol_rel = 1e-8;
  double tol_abs = 1e-12;
  int anderson_depth = 20;
  /// Splitting penalty for Lc > 0, in units of mu.
  double penalty = 1.0;
  double cg_tol = 1e-10;
  int cg_max_iter = 20000;
};

struct ProblemConfig {
  ModelParams params;
  GridSpec grid;
  unsigned micro_hard_faces = 0;
  unsigned dirichlet_faces = 0;
  LoadProgram load;
  Stepping stepping;
  FixedPointOptions fixed_point;
  int threads = 1;

  /// Throws ConfigError naming the violated constraint.
  void validate() const;
};

struct SolutionState {
  double t = 0.0;
  int step = 0;
  std::vector<double> u;          ///< 3 dofs per node
  TensorField p;                  ///< plastic distortion
  std::vector<double> gamma_p;    ///< per node
  std::vector<double> omega_p;    ///< per node
  TensorField sigma;              ///< nodal C(sym grad u - sym p)
  TensorField Sigma_curl;         ///< nodal -mu Lc^2 Curl Curl p
  std::vector<double> force;      ///< nodal external force (reactions and body load)
  double dissipation_cum = 0.0;
  double work_cum = 0.0;
  int outer_iterations = 0;       ///< of the last step
};

struct EnergyReport {
  double elastic_energy = 0.0;
  double defect_energy = 0.0;
  double hardening_energy = 0.0;
  double dissipation_increment = 0.0;
  double work_increment = 0.0;
  double total = 0.0;  ///< elastic + defect + hardening
};

class Solver {
 public:
  explicit Solver(ProblemConfig cfg);

  const ProblemConfig& config() const { return cfg_; }
  const BoundaryMask& mask() const { return mask_; }
  /// Splitting penalty used by the fixed point when Lc > 0 (zero otherwise).
  double penalty() const { return beta_; }

  /// Zero state, or the given initial plastic distortion (projected onto the
  /// micro-hard conditions) in equilibrium at t = 0.
  SolutionState initial_state(const TensorField* p0 = nullptr) const;

  /// Advances one load step. Throws OuterNonConvergence.
  EnergyReport step(SolutionState& s) const;

  /// Energies of a state; dissipation and work increments are left at zero.
  EnergyReport energy(const SolutionState& s) const;

  /// Displacement in equilibrium with p at time t, warm-started from guess.
  std::vector<double> equilibrium(const TensorField& p, double t,
                                  std::vector<double> guess = {}) const;

 private:
  struct DefectSolve;
  struct LocalResult {
    TensorField p;
    std::vector<double> gamma_p, omega_p;
    double dissipation = 0.0;
  };

  DirichletData dirichlet(double t) const;
  std::vector<double> external(double t) const;
  double rho_at(int step) const;
  /// Pointwise updates from state s with strain sym grad u - sym p_lin + sym p_lin,
  /// the given backstress and proximal shift c.
  LocalResult local_update(const SolutionState& s, const TensorField& p_lin,
                           const std::vector<double>& u, const TensorField& back, double c,
                           double dt, double rho) const;
  TensorField defect_solve(const TensorField& rhs) const;
  void finalize(SolutionState& s) const;

  ProblemConfig cfg_;
  BoundaryMask mask_;
  ElasticityOperator K_;
  std::vector<double> w_;
  double beta_ = 0.0;
  std::shared_ptr<const DefectSolve> defect_;
};

std::vector<double> solve_equilibrium(const TensorField& p, const ProblemConfig& cfg, double t);
std::pair<SolutionState, EnergyReport> time_step(const SolutionState& s, const ProblemConfig& cfg);
EnergyReport assemble_energy(const SolutionState& s, const ProblemConfig& cfg);

struct StepRecord {
  double t = 0.0;
  EnergyReport energy;
  double dissipation_cum = 0.0;
  double work_cum = 0.0;
  double max_gamma_p = 0.0;
  double max_omega_p = 0.0;
  double norm_skew_p = 0.0;
  double max_trace_p = 0.0;
  int outer_iterations = 0;
};

StepRecord make_record(const SolutionState& s, const EnergyReport& e);

struct UniquenessReport {
  std::vector<double> t;
  /// |C^-1/2 (s2 - s1)|^2 + mu Lc^2 |Curl(p1 - p2)|^2 + mu a1 |g2 - g1|^2 + mu a2 |w2 - w1|^2
  std::vector<double> metric;
  /// max_k metric[k] / min_{j <= k} metric[j] - 1
  double max_relative_increase = 0.0;
};

/// Admissible perturbation delta sin(pi y / H) T with T a random trace-free
/// tensor (unit norm), projected onto the micro-hard conditions.
TensorField twin_perturbation(const ProblemConfig& cfg, double delta, std::uint64_t seed);

UniquenessReport uniqueness_contraction_check(const ProblemConfig& cfg, double perturbation,
                                              std::uint64_t seed = 1);

struct LcStudyEntry {
  double Lc = 0.0;
  double norm_skew_p = 0.0;
  std::vector<double> max_gamma_history;
};

std::vector<LcStudyEntry> limit_study_Lc(const ProblemConfig& cfg,
                                         const std::vector<double>& Lc_values);

/// Squared difference metric of two states.
double twin_metric(const SolutionState& a, const SolutionState& b, const ProblemConfig& cfg);

/// L2 norm of skew p.
double norm_skew(const TensorField& p);

}  // namespace gradplast
