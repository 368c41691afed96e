#include "gradplast/fe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gradplast/simd/kernels.hpp"

namespace gradplast {

ElasticityOperator::ElasticityOperator(const GridSpec& g, const ElasticModuli& m)
    : grid_(g), mod_(m) {
  int act[3];
  int d = 0;
  for (int a = 0; a < 3; ++a)
    if (g.active(a)) act[d++] = a;
  nen_ = 1 << d;
  nq_ = 1 << d;
  wq_ = std::pow(0.5 * g.h, d);
  N_.assign(static_cast<std::size_t>(nq_) * nen_, 0.0);
  dN_.assign(static_cast<std::size_t>(nq_) * nen_ * 3, 0.0);
  const double gp = 1.0 / std::sqrt(3.0);
  for (int q = 0; q < nq_; ++q) {
    double xi[3];
    for (int b = 0; b < d; ++b) xi[b] = ((q >> b) & 1) ? gp : -gp;
    for (int a = 0; a < nen_; ++a) {
      double s[3], f[3];
      for (int b = 0; b < d; ++b) {
        s[b] = ((a >> b) & 1) ? 1.0 : -1.0;
        f[b] = 0.5 * (1.0 + s[b] * xi[b]);
      }
      double n = 1.0;
      for (int b = 0; b < d; ++b) n *= f[b];
      N_[q * nen_ + a] = n;
      for (int b = 0; b < d; ++b) {
        double v = s[b] / g.h;
        for (int c = 0; c < d; ++c)
          if (c != b) v *= f[c];
        dN_[(q * nen_ + a) * 3 + act[b]] = v;
      }
    }
  }
  const int ne = 3 * nen_;
  Ke_.assign(static_cast<std::size_t>(ne) * ne, 0.0);
  const double mu = m.mu(), lam = m.lambda();
  for (int q = 0; q < nq_; ++q)
    for (int a = 0; a < nen_; ++a)
      for (int b = 0; b < nen_; ++b) {
        const double* ga = &dN_[(q * nen_ + a) * 3];
        const double* gb = &dN_[(q * nen_ + b) * 3];
        const double gg = ga[0] * gb[0] + ga[1] * gb[1] + ga[2] * gb[2];
        for (int i = 0; i < 3; ++i)
          for (int k = 0; k < 3; ++k) {
            double v = lam * ga[i] * gb[k] + mu * ga[k] * gb[i];
            if (i == k) v += mu * gg;
            Ke_[(3 * a + i) * ne + 3 * b + k] += wq_ * v;
          }
      }
  w_node_ = g.weights();
}

template <class Fn>
void ElasticityOperator::for_each_element(Fn&& fn) const {
  int act[3];
  int d = 0;
  for (int a = 0; a < 3; ++a)
    if (grid_.active(a)) act[d++] = a;
  const int ex = std::max(grid_.cells[0], 1), ey = std::max(grid_.cells[1], 1),
            ez = std::max(grid_.cells[2], 1);
  Element e;
  for (int k = 0; k < ez; ++k)
    for (int j = 0; j < ey; ++j)
      for (int i = 0; i < ex; ++i) {
        for (int a = 0; a < nen_; ++a) {
          int idx[3] = {i, j, k};
          for (int b = 0; b < 3; ++b)
            if (!grid_.active(b)) idx[b] = 0;
          for (int b = 0; b < d; ++b) idx[act[b]] += (a >> b) & 1;
          e.nodes[a] = grid_.index(idx[0], idx[1], idx[2]);
        }
        fn(e);
      }
}

void ElasticityOperator::apply(std::span<const double> u, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const int ne = 3 * nen_;
  double ue[24], fe[24];
  for_each_element([&](const Element& e) {
    for (int a = 0; a < nen_; ++a)
      for (int i = 0; i < 3; ++i) ue[3 * a + i] = u[3 * e.nodes[a] + i];
    for (int r = 0; r < ne; ++r) {
      const double* row = &Ke_[static_cast<std::size_t>(r) * ne];
      double s = 0.0;
      for (int c = 0; c < ne; ++c) s += row[c] * ue[c];
      fe[r] = s;
    }
    for (int a = 0; a < nen_; ++a)
      for (int i = 0; i < 3; ++i) out[3 * e.nodes[a] + i] += fe[3 * a + i];
  });
}

std::vector<double> ElasticityOperator::diagonal() const {
  std::vector<double> d(dofs(), 0.0);
  const int ne = 3 * nen_;
  for_each_element([&](const Element& e) {
    for (int a = 0; a < nen_; ++a)
      for (int i = 0; i < 3; ++i)
        d[3 * e.nodes[a] + i] += Ke_[static_cast<std::size_t>(3 * a + i) * ne + 3 * a + i];
  });
  return d;
}

std::vector<double> ElasticityOperator::plastic_load(const TensorField& p) const {
  std::vector<double> f(dofs(), 0.0);
  for_each_element([&](const Element& e) {
    for (int q = 0; q < nq_; ++q) {
      Tensor3 pq;
      for (int a = 0; a < nen_; ++a) pq += N_[q * nen_ + a] * p[e.nodes[a]];
      const Tensor3 s = apply_Ciso(mod_, sym(pq));
      for (int a = 0; a < nen_; ++a) {
        const double* g = &dN_[(q * nen_ + a) * 3];
        for (int i = 0; i < 3; ++i)
          f[3 * e.nodes[a] + i] += wq_ * (s(i, 0) * g[0] + s(i, 1) * g[1] + s(i, 2) * g[2]);
      }
    }
  });
  return f;
}

std::vector<double> ElasticityOperator::body_load(const std::vector<Vec3>& f) const {
  std::vector<double> out(dofs(), 0.0);
  for (std::size_t n = 0; n < f.size(); ++n)
    for (int i = 0; i < 3; ++i) out[3 * n + i] = w_node_[n] * f[n][i];
  return out;
}

std::vector<double> ElasticityOperator::internal_force(std::span<const double> u,
                                                       const TensorField& p) const {
  std::vector<double> f(dofs());
  apply(u, f);
  const std::vector<double> fp = plastic_load(p);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] -= fp[i];
  return f;
}

CgResult ElasticityOperator::solve(const TensorField& p, const std::vector<double>& external,
                                   const DirichletData& bc, std::vector<double>& u, double tol,
                                   int max_iter) const {
  const std::size_t n = dofs();
  if (u.size() != n) u.assign(n, 0.0);
  std::vector<double> rhs = plastic_load(p);
  for (std::size_t i = 0; i < n; ++i) rhs[i] += external[i];

  // b = rhs - K lift, lift carrying only the Dirichlet values.
  std::vector<double> lift(n, 0.0), tmp(n);
  for (std::size_t i = 0; i < n; ++i)
    if (bc.fixed[i]) lift[i] = u[i] = bc.value[i];
  apply(lift, tmp);
  double bnorm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (!bc.fixed[i]) bnorm2 += (rhs[i] - tmp[i]) * (rhs[i] - tmp[i]);
  const double bnorm = std::sqrt(bnorm2);

  CgResult res;
  if (bnorm == 0.0) {
    for (std::size_t i = 0; i < n; ++i)
      if (!bc.fixed[i]) u[i] = 0.0;
    res.converged = true;
    return res;
  }

  std::vector<double> r(n), z(n), d(n), q(n), dinv = diagonal();
  for (std::size_t i = 0; i < n; ++i) dinv[i] = bc.fixed[i] ? 0.0 : 1.0 / dinv[i];
  apply(u, tmp);
  for (std::size_t i = 0; i < n; ++i) r[i] = bc.fixed[i] ? 0.0 : rhs[i] - tmp[i];
  double rnorm = std::sqrt(simd::dot(r, r));
  for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
  d = z;
  double rz = simd::dot(r, z);
  int it = 0;
  while (rnorm > tol * bnorm && it < max_iter) {
    ++it;
    apply(d, q);
    for (std::size_t i = 0; i < n; ++i)
      if (bc.fixed[i]) q[i] = 0.0;
    const double dq = simd::dot(d, q);
    if (!(dq > 0.0)) break;
    const double alpha = rz / dq;
    simd::axpy(alpha, d, u);
    simd::axpy(-alpha, q, r);
    for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    const double rz_new = simd::dot(r, z);
    simd::xpby(z, rz_new / rz, d);
    rz = rz_new;
    rnorm = std::sqrt(simd::dot(r, r));
  }
  res.iterations = it;
  res.residual = rnorm / bnorm;
  res.converged = rnorm <= tol * bnorm;
  return res;
}

TensorField ElasticityOperator::elastic_strain_nodal(std::span<const double> u,
                                                     const TensorField& p) const {
  TensorField out = TensorField::zeros(grid_, p.mask);
  for_each_element([&](const Element& e) {
    for (int q = 0; q < nq_; ++q) {
      Tensor3 pq, gu;
      for (int a = 0; a < nen_; ++a) {
        pq += N_[q * nen_ + a] * p[e.nodes[a]];
        const double* g = &dN_[(q * nen_ + a) * 3];
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) gu(i, j) += u[3 * e.nodes[a] + i] * g[j];
      }
      const Tensor3 eq = sym(gu) - sym(pq);
      for (int a = 0; a < nen_; ++a) out[e.nodes[a]] += (wq_ * N_[q * nen_ + a]) * eq;
    }
  });
  for (std::size_t n = 0; n < out.size(); ++n) out[n] *= 1.0 / w_node_[n];
  return out;
}

double ElasticityOperator::elastic_energy(std::span<const double> u, const TensorField& p) const {
  double energy = 0.0;
  for_each_element([&](const Element& e) {
    for (int q = 0; q < nq_; ++q) {
      Tensor3 pq, gu;
      for (int a = 0; a < nen_; ++a) {
        pq += N_[q * nen_ + a] * p[e.nodes[a]];
        const double* g = &dN_[(q * nen_ + a) * 3];
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) gu(i, j) += u[3 * e.nodes[a] + i] * g[j];
      }
      const Tensor3 eq = sym(gu) - sym(pq);
      energy += 0.5 * wq_ * inner(apply_Ciso(mod_, eq), eq);
    }
  });
  return energy;
}

}  // namespace gradplast
