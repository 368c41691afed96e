#pragma once

// Dissipation functions, their conjugates, and the set of admissible
// generalized stresses with its three-branch yield surface.

#include <cmath>
#include <limits>
#include <string_view>

#include "gradplast/tensor.hpp"

namespace gradplast {

/// Real number or +infinity, kept as a tag so indicator functions stay exact.
class ExtendedScalar {
 public:
  static constexpr ExtendedScalar finite(double v) { return ExtendedScalar(v, false); }
  static constexpr ExtendedScalar infinity() { return ExtendedScalar(0.0, true); }

  constexpr bool is_infinite() const { return inf_; }
  constexpr bool is_finite() const { return !inf_; }
  /// The finite value; +inf as a double for the infinite tag.
  constexpr double value() const { return inf_ ? std::numeric_limits<double>::infinity() : v_; }

 private:
  constexpr ExtendedScalar(double v, bool inf) : v_(v), inf_(inf) {}
  double v_;
  bool inf_;
};

/// Initial yield stresses and rate-one dissipation offsets.
/// sigma0 > 0 and sigma_hat0 > 0 are required: with sigma_hat0 = 0 the
/// elastic domain can have empty interior.
class YieldParams {
 public:
  static YieldParams make(double sigma0, double sigma_hat0, double r1 = 0.0, double r2 = 0.0);

  double sigma0() const { return sigma0_; }
  double sigma_hat0() const { return sigma_hat0_; }
  double r1() const { return r1_; }
  double r2() const { return r2_; }
  /// Default branch classification tolerance, 1e-9 max(sigma0, sigma_hat0).
  double default_tol() const { return 1e-9 * std::fmax(sigma0_, sigma_hat0_); }

 private:
  YieldParams(double s0, double sh0, double r1, double r2)
      : sigma0_(s0), sigma_hat0_(sh0), r1_(r1), r2_(r2) {}
  double sigma0_;
  double sigma_hat0_;
  double r1_;
  double r2_;
};

struct HardeningState {
  double gamma_p = 0.0;
  double omega_p = 0.0;
};

/// (Sigma_E, g1, g2): argument of the yield function.
struct GeneralizedStress {
  Tensor3 Sigma_E;
  double g1 = 0.0;
  double g2 = 0.0;
};

/// Point in the reduced (A, B) plane.
struct ABPoint {
  double A = 0.0;
  double B = 0.0;
};

enum class Branch { Interior, S1, S2, S3, Corner12 };

std::string_view to_string(Branch b);

/// D(s, t) = sqrt(sigma0^2 s^2 + sigma_hat0^2 t^2). Throws on negative input.
double D(double s, double t, const YieldParams& yp);
/// r1 s + r2 t + D(s, t).
double D_hat(double s, double t, const YieldParams& yp);

/// Dissipation function Delta(q, eta, beta): D(|sym q|, |skew q|) when
/// |sym q| <= eta and |skew q| <= beta (to cons_tol), +inf otherwise.
/// Uses D_hat when the offsets r1, r2 are nonzero.
ExtendedScalar delta(const Tensor3& q, double eta, double beta, const YieldParams& yp,
                     double cons_tol = 1e-10);

/// Closed-form sup_{s,t>=0} { A s + B t - sqrt(s^2 + t^2) }: 0 on the
/// normalized admissible set, +inf elsewhere. Boundary tolerance 1e-12.
ExtendedScalar conjugate_f(double A, double B);

/// (A, B) in K = K1 u K2 u K3.
bool in_set_K(ABPoint p, const YieldParams& yp);

/// Reduced coordinates of a generalized stress:
///   A = |dev sym Sigma_E| + g1 - r1,  B = |skew Sigma_E| + g2 - r2.
/// The offsets enter with a minus sign: the conjugate of D_hat is
/// f((A - r1)/sigma0, (B - r2)/sigma_hat0), which dilates the domain.
ABPoint reduced_coordinates(const GeneralizedStress& s, const YieldParams& yp);

bool elastic_domain_membership(const GeneralizedStress& s, const YieldParams& yp);

/// Branch owning the quadrant of (A, B): B <= 0 -> S1, else A <= 0 -> S2,
/// else S3. Used for trial states outside the domain and to pick the
/// yield-function expression for interior states.
Branch nearest_branch(ABPoint p);

/// Classifies a generalized stress. Junction points (sigma0, 0) and
/// (0, sigma_hat0) are assigned to S3. Interior for strictly admissible
/// states; trial states outside take nearest_branch(). Corner12 is never
/// returned: the A <= 0, B <= 0 quadrant lies strictly inside.
/// Throws std::invalid_argument when g1 > tol or g2 > tol.
Branch classify_branch(const GeneralizedStress& s, const YieldParams& yp, double tol);
Branch classify_branch(const GeneralizedStress& s, const YieldParams& yp);

/// Branch-wise yield function: A - sigma0 on S1, B - sigma_hat0 on S2,
/// A^2/sigma0^2 + B^2/sigma_hat0^2 - 1 on S3. Throws for other branches.
double yield_phi(const GeneralizedStress& s, const YieldParams& yp, Branch branch);
double yield_phi(ABPoint p, const YieldParams& yp, Branch branch);

}  // namespace gradplast
