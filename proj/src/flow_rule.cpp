#include "gradplast/flow_rule.hpp"

#include <algorithm>
#include <cmath>

namespace gradplast {

void ModelParams::validate() const {
  if (!(Lc >= 0.0)) throw std::invalid_argument("model params: Lc must be non-negative");
  if (!(alpha1 >= 0.0)) throw std::invalid_argument("model params: alpha1 must be non-negative");
  if (!(alpha2 >= 0.0)) throw std::invalid_argument("model params: alpha2 must be non-negative");
  if (!(rho > 0.0)) throw std::invalid_argument("model params: rho must be positive");
  if (n_exp < 1 || m_exp < 1)
    throw std::invalid_argument("model params: viscosity exponents must be >= 1");
}

double g1_of(const ModelParams& mp, double gamma_p) { return -mp.mu() * mp.alpha1 * gamma_p; }
double g2_of(const ModelParams& mp, double omega_p) { return -mp.mu() * mp.alpha2 * omega_p; }

namespace {

// Unit direction of t, or a DegenerateDirection error when its coefficient is
// nonzero but t is below dir_tol. A zero coefficient yields a zero tensor.
Tensor3 direction(const Tensor3& t, double coefficient, double dir_tol, const char* what) {
  if (coefficient == 0.0) return Tensor3::zero();
  const double n = norm(t);
  if (n < dir_tol) throw DegenerateDirection(std::string("vanishing ") + what + " direction");
  return t / n;
}

double dir_tol_of(const YieldParams& yp) { return 1e-14 * yp.sigma0(); }

FlowRateResult assemble_rate(const Tensor3& dsym, const Tensor3& dskew, double dgamma,
                             double domega, double lambda, Branch b) {
  FlowRateResult r;
  r.dot_p = dsym + dskew;
  r.dot_gamma = dgamma;
  r.dot_omega = domega;
  r.lambda = lambda;
  r.branch = b;
  return r;
}

double pos_pow(double x, int k) { return x > 0.0 ? std::pow(x, k) : 0.0; }

// Trial data shared by the rate-independent and viscoplastic updates.
struct Trial {
  Tensor3 D;  // dev sym Sigma_E^trial
  Tensor3 W;  // skew Sigma_E^trial
  double a = 0.0;
  double b = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
};

Trial make_trial(const MaterialPointState& st, const Tensor3& strain, const Tensor3& backstress,
                 const ModelParams& mp) {
  const Tensor3 sigma_tr = apply_Ciso(mp.elastic, strain - sym(st.p));
  const Tensor3 sig_e = sigma_tr + backstress;
  Trial t;
  t.D = dev(sym(sig_e));
  t.W = skew(sig_e);
  t.g1 = g1_of(mp, st.gamma_p);
  t.g2 = g2_of(mp, st.omega_p);
  t.a = norm(t.D) + t.g1 - mp.yield.r1();
  t.b = norm(t.W) + t.g2 - mp.yield.r2();
  return t;
}

ReturnMapResult finish(const MaterialPointState& st, const Tensor3& strain,
                       const Tensor3& backstress, const ModelParams& mp, double dt, double c,
                       const Tensor3& dsym, const Tensor3& dskew, double dgamma, double domega,
                       double lambda_incr, Branch b, int iters) {
  ReturnMapResult out;
  out.state.p = st.p + dsym + dskew;
  out.state.gamma_p = st.gamma_p + dgamma;
  out.state.omega_p = st.omega_p + domega;
  out.sigma = apply_Ciso(mp.elastic, strain - sym(out.state.p));
  out.stress.Sigma_E = out.sigma + backstress - c * (dsym + dskew);
  out.stress.g1 = g1_of(mp, out.state.gamma_p);
  out.stress.g2 = g2_of(mp, out.state.omega_p);
  const double inv_dt = 1.0 / dt;
  out.rate = assemble_rate(dsym * inv_dt, dskew * inv_dt, dgamma * inv_dt, domega * inv_dt,
                           lambda_incr * inv_dt, b);
  out.iterations = iters;
  return out;
}

void check_step(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time increment must be positive");
}

// Root of dx = k [x0 - h dx]_+^n. In the overstress z = x0 - h dx the
// equation k h z^n + z - x0 = 0 is convex increasing; Newton from the upper
// bound min(x0, (x0 / (k h))^(1/n)) decreases monotonically to the root.
double implicit_overstress(double x0, double h, double k, int n, const ReturnMapOptions& opts,
                           int& iters) {
  if (x0 <= 0.0 || k == 0.0) return 0.0;
  if (h <= 0.0) return k * std::pow(x0, n);
  if (n == 1) return k * x0 / (1.0 + k * h);
  const double kh = k * h;
  double z = std::min(x0, std::pow(x0 / kh, 1.0 / n));
  for (int it = 1; it <= opts.max_iter; ++it) {
    iters = it;
    const double G = kh * std::pow(z, n) + z - x0;
    if (G <= opts.newton_tol * x0) return (x0 - z) / h;
    z -= G / (kh * n * std::pow(z, n - 1) + 1.0);
  }
  throw NonConvergence("viscoplastic update", opts.max_iter, z);
}

}  // namespace

FlowRateResult dual_flow_rate(const GeneralizedStress& s, double lambda, const ModelParams& mp) {
  if (lambda < 0.0) throw std::invalid_argument("dual_flow_rate: lambda must be non-negative");
  const YieldParams& yp = mp.yield;
  const Branch b = classify_branch(s, yp);
  const ABPoint ab = reduced_coordinates(s, yp);
  const Tensor3 D = dev(sym(s.Sigma_E));
  const Tensor3 W = skew(s.Sigma_E);
  const double tol = dir_tol_of(yp);
  switch (b) {
    case Branch::S1: {
      const Tensor3 dsym = lambda * direction(D, lambda, tol, "dev sym Sigma_E");
      return assemble_rate(dsym, Tensor3::zero(), lambda, 0.0, lambda, b);
    }
    case Branch::S2: {
      const Tensor3 dskew = lambda * direction(W, lambda, tol, "skew Sigma_E");
      return assemble_rate(Tensor3::zero(), dskew, 0.0, lambda, lambda, b);
    }
    case Branch::S3: {
      const double s0 = yp.sigma0();
      const double sh0 = yp.sigma_hat0();
      const double cg = 2.0 * lambda / (s0 * s0) * ab.A;
      const double co = 2.0 * lambda / (sh0 * sh0) * ab.B;
      const Tensor3 dsym = cg * direction(D, cg, tol, "dev sym Sigma_E");
      const Tensor3 dskew = co * direction(W, co, tol, "skew Sigma_E");
      return assemble_rate(dsym, dskew, cg, co, lambda, b);
    }
    default:
      return assemble_rate(Tensor3::zero(), Tensor3::zero(), 0.0, 0.0, 0.0, Branch::Interior);
  }
}

FlowRateResult viscoplastic_rate(const GeneralizedStress& s, const ModelParams& mp) {
  const YieldParams& yp = mp.yield;
  const ABPoint ab = reduced_coordinates(s, yp);
  const double rg = pos_pow(ab.A - yp.sigma0(), mp.n_exp) / mp.rho;
  const double ro = pos_pow(ab.B - yp.sigma_hat0(), mp.m_exp) / mp.rho;
  const double tol = dir_tol_of(yp);
  const Tensor3 dsym = rg * direction(dev(sym(s.Sigma_E)), rg, tol, "dev sym Sigma_E");
  const Tensor3 dskew = ro * direction(skew(s.Sigma_E), ro, tol, "skew Sigma_E");
  Branch b = Branch::Interior;
  double lambda = 0.0;
  if (rg > 0.0 && ro > 0.0) {
    b = Branch::S3;
    lambda = 0.5 * std::hypot(yp.sigma0() * rg, yp.sigma_hat0() * ro);
  } else if (rg > 0.0) {
    b = Branch::S1;
    lambda = rg;
  } else if (ro > 0.0) {
    b = Branch::S2;
    lambda = ro;
  }
  return assemble_rate(dsym, dskew, rg, ro, lambda, b);
}

ReturnMapResult return_map(const MaterialPointState& state, const Tensor3& strain,
                           const Tensor3& backstress, const ModelParams& mp, double dt,
                           const ReturnMapOptions& opts) {
  check_step(dt);
  const YieldParams& yp = mp.yield;
  const double mu = mp.mu();
  const double c = opts.prox_shift;
  const Trial t = make_trial(state, strain, backstress, mp);
  const double h1 = 2.0 * mu + c + mu * mp.alpha1;
  const double h2 = c + mu * mp.alpha2;
  const double tol = dir_tol_of(yp);

  if (in_set_K({t.a, t.b}, yp)) {
    return finish(state, strain, backstress, mp, dt, c, Tensor3::zero(), Tensor3::zero(), 0.0,
                  0.0, 0.0, Branch::Interior, 0);
  }

  const Branch b = nearest_branch({t.a, t.b});
  if (b == Branch::S1) {
    const double dg = (t.a - yp.sigma0()) / h1;
    const Tensor3 dsym = dg * direction(t.D, dg, tol, "dev sym Sigma_E");
    return finish(state, strain, backstress, mp, dt, c, dsym, Tensor3::zero(), dg, 0.0, dg, b, 1);
  }
  if (b == Branch::S2) {
    if (!(h2 > 0.0))
      throw IllPosedSpin("return_map: spin flow on S2 without spin hardening or nonlocal coupling");
    const double dw = (t.b - yp.sigma_hat0()) / h2;
    const Tensor3 dskew = dw * direction(t.W, dw, tol, "skew Sigma_E");
    return finish(state, strain, backstress, mp, dt, c, Tensor3::zero(), dskew, 0.0, dw, dw, b, 1);
  }

  // S3: with k_i = h_i / sigma_i^2 the projection is A+ = a/(1 + kappa k1),
  // B+ = b/(1 + kappa k2); kappa solves the ellipse equation. F is convex and
  // decreasing, so Newton from a point left of the root increases monotonically.
  const double s0 = yp.sigma0();
  const double sh0 = yp.sigma_hat0();
  const double k1 = h1 / (s0 * s0);
  const double k2 = h2 / (sh0 * sh0);
  const double an = t.a / s0;
  const double bn = t.b / sh0;
  if (k2 <= 0.0 && bn >= 1.0)
    throw IllPosedSpin("return_map: S3 return needs spin flow beyond sigma_hat0 with no spin hardening");

  auto F = [&](double kappa, double& dF) {
    const double qa = 1.0 / (1.0 + kappa * k1);
    const double qb = 1.0 / (1.0 + kappa * k2);
    const double A = an * qa;
    const double B = bn * qb;
    dF = -2.0 * (A * A * k1 * qa + B * B * k2 * qb);
    return A * A + B * B - 1.0;
  };

  double kappa = std::max(an > 1.0 ? (an - 1.0) / k1 : 0.0,
                          (bn > 1.0 && k2 > 0.0) ? (bn - 1.0) / k2 : 0.0);
  int it = 0;
  double dF = 0.0;
  double r = F(kappa, dF);
  while (std::abs(r) > opts.newton_tol) {
    if (++it > opts.max_iter) throw NonConvergence("return_map S3 Newton", opts.max_iter, r);
    kappa -= r / dF;
    r = F(kappa, dF);
  }
  const double Ap = an / (1.0 + kappa * k1) * s0;
  const double Bp = bn / (1.0 + kappa * k2) * sh0;
  const double dg = kappa * Ap / (s0 * s0);
  const double dw = kappa * Bp / (sh0 * sh0);
  // dg <= kappa |D| / (s0^2 (1 + kappa k1)), so the scaling stays bounded as D -> 0.
  const double nD = norm(t.D);
  const double nW = norm(t.W);
  const Tensor3 dsym = nD > 0.0 ? (dg / nD) * t.D : Tensor3::zero();
  const Tensor3 dskew = nW > 0.0 ? (dw / nW) * t.W : Tensor3::zero();
  return finish(state, strain, backstress, mp, dt, c, dsym, dskew, dg, dw, 0.5 * kappa, b,
                std::max(it, 1));
}

ReturnMapResult viscoplastic_update(const MaterialPointState& state, const Tensor3& strain,
                                    const Tensor3& backstress, const ModelParams& mp, double dt,
                                    const ReturnMapOptions& opts) {
  check_step(dt);
  const YieldParams& yp = mp.yield;
  const double mu = mp.mu();
  const double c = opts.prox_shift;
  const Trial t = make_trial(state, strain, backstress, mp);
  const double k = dt / mp.rho;
  int it_g = 0;
  int it_w = 0;
  const double dg =
      implicit_overstress(t.a - yp.sigma0(), 2.0 * mu + c + mu * mp.alpha1, k, mp.n_exp, opts, it_g);
  const double dw =
      implicit_overstress(t.b - yp.sigma_hat0(), c + mu * mp.alpha2, k, mp.m_exp, opts, it_w);
  const double tol = dir_tol_of(yp);
  const Tensor3 dsym = dg * direction(t.D, dg, tol, "dev sym Sigma_E");
  const Tensor3 dskew = dw * direction(t.W, dw, tol, "skew Sigma_E");
  Branch b = Branch::Interior;
  double lambda = 0.0;
  if (dg > 0.0 && dw > 0.0) {
    b = Branch::S3;
    lambda = 0.5 * std::hypot(yp.sigma0() * dg, yp.sigma_hat0() * dw);
  } else if (dg > 0.0) {
    b = Branch::S1;
    lambda = dg;
  } else if (dw > 0.0) {
    b = Branch::S2;
    lambda = dw;
  }
  return finish(state, strain, backstress, mp, dt, c, dsym, dskew, dg, dw, lambda, b,
                std::max(it_g, it_w));
}

namespace {

double constrained_threshold(const ModelParams& mp, double g1, double g2) {
  const YieldParams& yp = mp.yield;
  return (yp.r1() + yp.r2() - g1 - g2 + std::hypot(yp.sigma0(), yp.sigma_hat0())) / std::sqrt(2.0);
}

// Unit in-plane direction of Sigma n, or zero.
Vec3 tangential_direction(const Tensor3& sig, const Vec3& n, double& tau) {
  Vec3 v{0.0, 0.0, 0.0};
  for (int i = 0; i < 3; ++i) v[i] = dot(sig.row(i), n);
  const double vn = dot(v, n);
  for (int i = 0; i < 3; ++i) v[i] -= vn * n[i];
  tau = norm(v);
  if (tau == 0.0) return v;
  for (double& x : v) x /= tau;
  return v;
}

}  // namespace

ReturnMapResult constrained_return_map(const MaterialPointState& state, const Tensor3& strain,
                                       const Tensor3& backstress, const Vec3& normal,
                                       const ModelParams& mp, double dt, bool viscous,
                                       const ReturnMapOptions& opts) {
  check_step(dt);
  const double mu = mp.mu();
  const double c = opts.prox_shift;
  const Tensor3 sig_tr = apply_Ciso(mp.elastic, strain - sym(state.p)) + backstress;
  double tau = 0.0;
  const Vec3 dir = tangential_direction(sig_tr, normal, tau);
  const double over =
      tau - constrained_threshold(mp, g1_of(mp, state.gamma_p), g2_of(mp, state.omega_p));
  const double H = mu + c + 0.5 * mu * (mp.alpha1 + mp.alpha2);
  double s = 0.0;
  int iters = 0;
  if (viscous) {
    s = implicit_overstress(over, H, dt / mp.rho, mp.n_exp, opts, iters);
  } else if (over > 0.0) {
    s = over / H;
    iters = 1;
  }
  if (s > 0.0 && tau < dir_tol_of(mp.yield))
    throw DegenerateDirection("constrained return: vanishing tangential traction");
  const Tensor3 dp = s * outer(dir, normal);
  const double dg = s / std::sqrt(2.0);
  const Branch b = s > 0.0 ? Branch::S3 : Branch::Interior;
  // The multiplier reported is that of the scalar problem, |a| per unit time.
  return finish(state, strain, backstress, mp, dt, c, sym(dp), skew(dp), dg, dg, s, b, iters);
}

double constrained_kkt_residual(const ReturnMapResult& r, const Vec3& normal,
                                const ModelParams& mp) {
  double tau = 0.0;
  tangential_direction(r.stress.Sigma_E, normal, tau);
  const double phi = tau - constrained_threshold(mp, r.stress.g1, r.stress.g2);
  const double lam = r.rate.lambda;
  return std::max({-lam, phi, std::abs(lam * phi)});
}

double kkt_residual(const GeneralizedStress& s, const FlowRateResult& fr, const YieldParams& yp) {
  const ABPoint ab = reduced_coordinates(s, yp);
  const Branch b = fr.branch == Branch::Interior || fr.branch == Branch::Corner12
                       ? nearest_branch(ab)
                       : fr.branch;
  const double phi = yield_phi(ab, yp, b);
  return std::max({-fr.lambda, phi, std::abs(fr.lambda * phi)});
}

FlowRateResult classical_limit_rate(const Tensor3& sigma, double g1, double lambda_hat,
                                    const YieldParams& yp) {
  (void)g1;
  if (lambda_hat < 0.0)
    throw std::invalid_argument("classical_limit_rate: multiplier must be non-negative");
  const Tensor3 dsym =
      lambda_hat * direction(dev(sym(sigma)), lambda_hat, dir_tol_of(yp), "dev sigma");
  return assemble_rate(dsym, Tensor3::zero(), lambda_hat, 0.0, lambda_hat, Branch::S1);
}

double accumulate_omega(std::span<const std::pair<double, Tensor3>> history) {
  double omega = 0.0;
  for (const auto& [dt, w] : history) {
    if (!(dt > 0.0)) throw std::invalid_argument("accumulate_omega: dt must be positive");
    omega += dt * norm(skew(w));
  }
  return omega;
}

double incremental_dissipation(const GeneralizedStress& s, const Tensor3& dp, double dgamma,
                               double domega) {
  return inner(dev(sym(s.Sigma_E)), sym(dp)) + inner(skew(s.Sigma_E), skew(dp)) + s.g1 * dgamma +
         s.g2 * domega;
}

}  // namespace gradplast
