#pragma once

// Point-level constitutive evolution: branch-wise flow rates, the
// incremental return map, Norton-Hoff viscoplastic updates and the
// classical small length-scale limit.

#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "gradplast/convex.hpp"
#include "gradplast/tensor.hpp"

namespace gradplast {

struct ModelParams {
  ElasticModuli elastic;
  YieldParams yield;
  double Lc = 0.0;      ///< energetic length scale
  double alpha1 = 0.0;  ///< strain hardening, g1 = -mu alpha1 gamma_p
  double alpha2 = 0.0;  ///< spin hardening, g2 = -mu alpha2 omega_p
  double rho = 1.0;     ///< viscosity, only used by the viscoplastic path
  int n_exp = 1;
  int m_exp = 1;

  /// Checks Lc, alpha1, alpha2 >= 0, rho > 0 and exponents >= 1.
  void validate() const;
  double mu() const { return elastic.mu(); }
};

struct MaterialPointState {
  Tensor3 p;  ///< plastic distortion, trace free
  double gamma_p = 0.0;
  double omega_p = 0.0;
};

/// Thermodynamic forces g1 = -mu alpha1 gamma_p, g2 = -mu alpha2 omega_p.
double g1_of(const ModelParams& mp, double gamma_p);
double g2_of(const ModelParams& mp, double omega_p);

struct FlowRateResult {
  Tensor3 dot_p;
  double dot_gamma = 0.0;
  double dot_omega = 0.0;
  double lambda = 0.0;
  Branch branch = Branch::Interior;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, int iterations, double residual)
      : std::runtime_error(what + " (iterations " + std::to_string(iterations) + ", residual " +
                           std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// A flow direction is needed but the tensor it normalizes vanishes.
class DegenerateDirection : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rate-independent spin flow with no spin hardening and nothing else
/// restoring skew Sigma_E at the point. Resolve with the viscoplastic path.
class IllPosedSpin : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dual-form flow rates on the branch of S (classified with the default
/// tolerance). S1: sym p' = lambda N, S2: skew p' = lambda W,
/// S3: sym p' = (2 lambda / sigma0^2) A N, skew p' = (2 lambda / sigma_hat0^2) B W.
/// Interior states give zero rates.
FlowRateResult dual_flow_rate(const GeneralizedStress& s, double lambda, const ModelParams& mp);

/// Norton-Hoff overstress rates (explicit; defined for every stress state).
FlowRateResult viscoplastic_rate(const GeneralizedStress& s, const ModelParams& mp);

struct ReturnMapOptions {
  /// Scalar proximal stiffness c added to both moduli of the local problem:
  /// Sigma_E+ = Sigma_E^trial - (2 mu + c) dsym - c dskew. The caller folds
  /// c (p_iter - p_n) into the backstress so the fixed point is unchanged.
  double prox_shift = 0.0;
  double newton_tol = 1e-12;
  int max_iter = 50;
};

struct ReturnMapResult {
  MaterialPointState state;
  Tensor3 sigma;             ///< C(strain - sym p+)
  GeneralizedStress stress;  ///< converged (Sigma_E, g1, g2) seen by the local solve
  FlowRateResult rate;       ///< increments divided by dt
  int iterations = 0;
};

/// Implicit return map with the backstress held fixed.
/// Throws NonConvergence, DegenerateDirection, IllPosedSpin.
ReturnMapResult return_map(const MaterialPointState& state, const Tensor3& strain,
                           const Tensor3& backstress, const ModelParams& mp, double dt,
                           const ReturnMapOptions& opts = {});

/// Backward-Euler Norton-Hoff update with the backstress held fixed.
ReturnMapResult viscoplastic_update(const MaterialPointState& state, const Tensor3& strain,
                                    const Tensor3& backstress, const ModelParams& mp, double dt,
                                    const ReturnMapOptions& opts = {});

/// Local update at a micro-hard boundary node with outward unit normal n.
/// Increments are restricted to a (x) n with a . n = 0, which keeps p x n = 0
/// and tr p = 0; on this subspace |sym dp| = |skew dp| = |a| / sqrt 2 and the
/// local problem is scalar in |a|. viscous selects the Norton-Hoff update
/// (exponent n_exp) instead of the rate-independent one.
ReturnMapResult constrained_return_map(const MaterialPointState& state, const Tensor3& strain,
                                       const Tensor3& backstress, const Vec3& normal,
                                       const ModelParams& mp, double dt, bool viscous,
                                       const ReturnMapOptions& opts = {});

/// KKT residual of a constrained update: max(-lambda, phi, |lambda phi|) with
/// phi = a.Sigma_E n - (r1 + r2 - g1 - g2 + sqrt(sigma0^2 + sigma_hat0^2)) / sqrt 2.
double constrained_kkt_residual(const ReturnMapResult& r, const Vec3& normal,
                                const ModelParams& mp);

/// max(-lambda, phi, |lambda phi|) with phi on fr.branch (nearest branch
/// for interior states). <= tol certifies the KKT conditions.
double kkt_residual(const GeneralizedStress& s, const FlowRateResult& fr, const YieldParams& yp);

/// eps_p' = lambda_hat dev sigma / |dev sigma|, gamma' = lambda_hat, no spin.
FlowRateResult classical_limit_rate(const Tensor3& sigma, double g1, double lambda_hat,
                                    const YieldParams& yp);

/// sum dt |skew p'| over a history of (dt, skew p') pairs.
double accumulate_omega(std::span<const std::pair<double, Tensor3>> history);

/// <dev sym Sigma_E, dsym p> + <skew Sigma_E, dskew p> + g1 dgamma + g2 domega.
double incremental_dissipation(const GeneralizedStress& s, const Tensor3& dp, double dgamma,
                               double domega);

}  // namespace gradplast
