#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library code they check.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace oracle {

/// Grid maximum of  a s + b t - r1 s - r2 t - sqrt(s0^2 s^2 + sh0^2 t^2)
/// over the lattice (s, t) in [0, radius]^2 with the given step.
/// For fixed s the objective is concave in t, so each row maximum is found by
/// bisection on the sign of the forward difference; the result equals the
/// exhaustive lattice maximum.
inline double conjugate_grid_sup(double a, double b, double radius, double step, double s0 = 1.0,
                                 double sh0 = 1.0, double r1 = 0.0, double r2 = 0.0) {
  const long n = std::lround(radius / step);
  const double ca = a - r1;
  const double cb = b - r2;
  double best = -HUGE_VAL;
  for (long i = 0; i <= n; ++i) {
    const double s = i * step;
    auto f = [&](long j) {
      const double t = j * step;
      return ca * s + cb * t - std::sqrt(s0 * s0 * s * s + sh0 * sh0 * t * t);
    };
    long lo = 0;
    long hi = n;
    while (lo < hi) {
      const long mid = (lo + hi) / 2;
      if (f(mid + 1) > f(mid)) lo = mid + 1; else hi = mid;
    }
    best = std::max(best, f(lo));
  }
  return best;
}

/// Finite/infinite classification from the lattice supremum: bounded when the
/// supremum stays below tol; unbounded when it exceeds tol and grows when the
/// radius doubles.
enum class SupClass { Bounded, Unbounded, Unclear };

inline SupClass classify_sup(double a, double b, double radius, double step, double tol,
                             double s0 = 1.0, double sh0 = 1.0, double r1 = 0.0,
                             double r2 = 0.0) {
  const double sup = conjugate_grid_sup(a, b, radius, step, s0, sh0, r1, r2);
  if (sup <= tol) return SupClass::Bounded;
  const double sup2 = conjugate_grid_sup(a, b, 2.0 * radius, 2.0 * step, s0, sh0, r1, r2);
  return sup2 > sup ? SupClass::Unbounded : SupClass::Unclear;
}

/// Isotropic elasticity in Mandel notation (orthonormal basis of Sym(3)).
inline Eigen::Matrix<double, 6, 6> mandel_isotropic(double mu, double lambda) {
  Eigen::Matrix<double, 6, 6> C = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) C(i, j) = lambda;
    C(i, i) += 2.0 * mu;
    C(i + 3, i + 3) = 2.0 * mu;
  }
  return C;
}

/// Smallest eigenvalue of C on Sym(3).
inline double min_eig_isotropic(double mu, double lambda) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(mandel_isotropic(mu, lambda));
  return es.eigenvalues().minCoeff();
}

/// One step of von Mises radial return with linear isotropic hardening on
/// 3x3 row-major arrays: returns plastic strain increment and updates
/// eps_p and gamma. Hardening modulus H = mu alpha1 on the g1 = -H gamma
/// force; flow direction dev sigma_trial / |dev sigma_trial|.
struct RadialReturnState {
  std::array<double, 9> eps_p{};
  double gamma = 0.0;
};

inline void radial_return(RadialReturnState& st, const std::array<double, 9>& strain, double mu,
                          double lambda, double sigma0, double H) {
  std::array<double, 9> ee{};
  for (int k = 0; k < 9; ++k) ee[k] = strain[k] - st.eps_p[k];
  const double tr = ee[0] + ee[4] + ee[8];
  std::array<double, 9> s{};
  for (int k = 0; k < 9; ++k) s[k] = 2.0 * mu * ee[k];
  for (int k : {0, 4, 8}) s[k] += lambda * tr;
  const double m = (s[0] + s[4] + s[8]) / 3.0;
  std::array<double, 9> d = s;
  for (int k : {0, 4, 8}) d[k] -= m;
  double nd = 0.0;
  for (double v : d) nd += v * v;
  nd = std::sqrt(nd);
  const double f = nd - sigma0 - H * st.gamma;
  if (f <= 0.0) return;
  const double dg = f / (2.0 * mu + H);
  for (int k = 0; k < 9; ++k) st.eps_p[k] += dg * d[k] / nd;
  st.gamma += dg;
}

}  // namespace oracle
