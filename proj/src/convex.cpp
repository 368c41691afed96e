#include "gradplast/convex.hpp"

#include <stdexcept>
#include <string>

namespace gradplast {

namespace {
constexpr double kSetTol = 1e-12;
}

YieldParams YieldParams::make(double sigma0, double sigma_hat0, double r1, double r2) {
  if (!(sigma0 > 0.0)) throw std::invalid_argument("yield params: sigma0 must be positive");
  if (!(sigma_hat0 > 0.0))
    throw std::invalid_argument(
        "yield params: sigma_hat0 must be positive (sigma_hat0 = 0 leaves the elastic domain "
        "without interior)");
  if (!(r1 >= 0.0) || !(r2 >= 0.0))
    throw std::invalid_argument("yield params: r1 and r2 must be non-negative");
  return YieldParams(sigma0, sigma_hat0, r1, r2);
}

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::Interior: return "interior";
    case Branch::S1: return "S1";
    case Branch::S2: return "S2";
    case Branch::S3: return "S3";
    case Branch::Corner12: return "corner12";
  }
  return "?";
}

double D(double s, double t, const YieldParams& yp) {
  if (s < 0.0 || t < 0.0) throw std::invalid_argument("D: arguments must be non-negative");
  return std::hypot(yp.sigma0() * s, yp.sigma_hat0() * t);
}

double D_hat(double s, double t, const YieldParams& yp) {
  return yp.r1() * s + yp.r2() * t + D(s, t, yp);
}

ExtendedScalar delta(const Tensor3& q, double eta, double beta, const YieldParams& yp,
                     double cons_tol) {
  const double s = norm(sym(q));
  const double t = norm(skew(q));
  if (s > eta + cons_tol || t > beta + cons_tol) return ExtendedScalar::infinity();
  return ExtendedScalar::finite(D_hat(s, t, yp));
}

ExtendedScalar conjugate_f(double A, double B) {
  const bool bounded = (B <= kSetTol && A <= 1.0 + kSetTol) ||
                       (A <= kSetTol && B <= 1.0 + kSetTol) ||
                       (A >= -kSetTol && B >= -kSetTol && A * A + B * B <= 1.0 + kSetTol);
  return bounded ? ExtendedScalar::finite(0.0) : ExtendedScalar::infinity();
}

bool in_set_K(ABPoint p, const YieldParams& yp) {
  return conjugate_f(p.A / yp.sigma0(), p.B / yp.sigma_hat0()).is_finite();
}

ABPoint reduced_coordinates(const GeneralizedStress& s, const YieldParams& yp) {
  return {norm(dev(sym(s.Sigma_E))) + s.g1 - yp.r1(), norm(skew(s.Sigma_E)) + s.g2 - yp.r2()};
}

bool elastic_domain_membership(const GeneralizedStress& s, const YieldParams& yp) {
  return in_set_K(reduced_coordinates(s, yp), yp);
}

Branch nearest_branch(ABPoint p) {
  if (p.B <= 0.0) return Branch::S1;
  if (p.A <= 0.0) return Branch::S2;
  return Branch::S3;
}

Branch classify_branch(const GeneralizedStress& s, const YieldParams& yp, double tol) {
  if (s.g1 > tol || s.g2 > tol)
    throw std::invalid_argument("classify_branch: g1 and g2 must be non-positive");
  const ABPoint p = reduced_coordinates(s, yp);
  const double s0 = yp.sigma0();
  const double sh0 = yp.sigma_hat0();
  const double ellipse = (p.A / s0) * (p.A / s0) + (p.B / sh0) * (p.B / sh0) - 1.0;
  const double rel_tol = tol / std::fmax(s0, sh0);

  if (p.A >= -tol && p.B >= -tol && std::abs(ellipse) <= rel_tol) return Branch::S3;
  if (std::abs(p.A - s0) <= tol && p.B <= tol) return Branch::S1;
  if (std::abs(p.B - sh0) <= tol && p.A <= tol) return Branch::S2;
  if (in_set_K(p, yp)) return Branch::Interior;
  return nearest_branch(p);
}

Branch classify_branch(const GeneralizedStress& s, const YieldParams& yp) {
  return classify_branch(s, yp, yp.default_tol());
}

double yield_phi(ABPoint p, const YieldParams& yp, Branch branch) {
  switch (branch) {
    case Branch::S1: return p.A - yp.sigma0();
    case Branch::S2: return p.B - yp.sigma_hat0();
    case Branch::S3: {
      const double a = p.A / yp.sigma0();
      const double b = p.B / yp.sigma_hat0();
      return a * a + b * b - 1.0;
    }
    default:
      throw std::invalid_argument("yield_phi: branch must be S1, S2 or S3, got " +
                                  std::string(to_string(branch)));
  }
}

double yield_phi(const GeneralizedStress& s, const YieldParams& yp, Branch branch) {
  return yield_phi(reduced_coordinates(s, yp), yp, branch);
}

}  // namespace gradplast
