#include "gradplast/point_driver.hpp"

#include <cstdio>
#include <ostream>

namespace gradplast {

namespace {

double factor_at(const std::vector<std::pair<double, double>>& table, double t) {
  LoadProgram lp;
  lp.factor = table;
  return lp.at(t);
}

}  // namespace

std::vector<PointRecord> run_point_driver(const PointProgram& prog) {
  prog.params.validate();
  const YieldParams& yp = prog.params.yield;
  std::vector<PointRecord> out;
  out.reserve(static_cast<std::size_t>(prog.n_steps) + 1);
  MaterialPointState st;
  PointRecord r0;
  r0.strain = factor_at(prog.factor, 0.0) * prog.strain;
  r0.stress = apply_Ciso(prog.params.elastic, r0.strain);
  {
    GeneralizedStress g{r0.stress, 0.0, 0.0};
    r0.branch = classify_branch(g, yp);
    r0.phi = yield_phi(g, yp, nearest_branch(reduced_coordinates(g, yp)));
  }
  out.push_back(r0);
  const Tensor3 back = Tensor3::zero();
  for (int k = 1; k <= prog.n_steps; ++k) {
    const double t = k * prog.dt;
    const Tensor3 strain = factor_at(prog.factor, t) * prog.strain;
    const ReturnMapResult r = prog.path == FlowPath::RateIndependent
                                  ? return_map(st, strain, back, prog.params, prog.dt)
                                  : viscoplastic_update(st, strain, back, prog.params, prog.dt);
    st = r.state;
    PointRecord rec;
    rec.t = t;
    rec.strain = strain;
    rec.stress = r.sigma;
    rec.gamma_p = st.gamma_p;
    rec.omega_p = st.omega_p;
    rec.branch = r.rate.branch;
    rec.lambda = r.rate.lambda;
    const Branch b = rec.branch == Branch::Interior
                         ? nearest_branch(reduced_coordinates(r.stress, yp))
                         : rec.branch;
    rec.phi = yield_phi(r.stress, yp, b);
    out.push_back(rec);
  }
  return out;
}

void write_point_csv(std::ostream& os, const std::vector<PointRecord>& rows) {
  static const int idx[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
  os << "t,e11,e22,e33,e12,e13,e23,s11,s22,s33,s12,s13,s23,gamma_p,omega_p,branch,lambda,phi\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (const PointRecord& r : rows) {
    num(r.t);
    for (const auto& ij : idx) os << ',', num(r.strain(ij[0], ij[1]));
    for (const auto& ij : idx) os << ',', num(r.stress(ij[0], ij[1]));
    os << ',', num(r.gamma_p);
    os << ',', num(r.omega_p);
    os << ',' << to_string(r.branch) << ',';
    num(r.lambda);
    os << ',', num(r.phi);
    os << '\n';
  }
}

}  // namespace gradplast
