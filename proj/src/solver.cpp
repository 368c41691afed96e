#include "gradplast/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

namespace gradplast {

namespace {

template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t nt = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr err;
  std::mutex m;
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + nt - 1) / nt;
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t * chunk; i < std::min(n, (t + 1) * chunk); ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(m);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

bool uses_defect(const ModelParams& mp, const GridSpec& g) {
  if (mp.Lc <= 0.0) return false;
  for (int a = 0; a < 3; ++a)
    if (g.active(a) && g.nodes(a) < 3) return false;
  return true;
}

double weighted_sum(const std::vector<double>& w, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i];
  return s;
}

// Matrix of curl_curl_field restricted to one tensor row (3 dofs per node,
// the same for every row), probed with a 7-periodic colouring: the stencils
// reach at most 3 nodes along an axis, so each output sees one source per colour.
Eigen::SparseMatrix<double> curl_curl_row_matrix(const GridSpec& g) {
  const std::size_t nn = g.node_count();
  constexpr int P = 7;
  int per[3];
  for (int a = 0; a < 3; ++a) per[a] = g.active(a) ? P : 1;
  std::vector<Eigen::Triplet<double>> trip;
  TensorField v = TensorField::zeros(g);
  for (int cz = 0; cz < per[2]; ++cz)
    for (int cy = 0; cy < per[1]; ++cy)
      for (int cx = 0; cx < per[0]; ++cx)
        for (int b = 0; b < 3; ++b) {
          const int col[3] = {cx, cy, cz};
          for (auto& t : v.values) t = Tensor3::zero();
          for (std::size_t n = 0; n < nn; ++n) {
            int ijk[3];
            g.coords(n, ijk[0], ijk[1], ijk[2]);
            if (ijk[0] % per[0] == cx && ijk[1] % per[1] == cy && ijk[2] % per[2] == cz)
              v[n](0, b) = 1.0;
          }
          const TensorField out = curl_curl_field(v);
          for (std::size_t m = 0; m < nn; ++m) {
            int ijk[3];
            g.coords(m, ijk[0], ijk[1], ijk[2]);
            int src[3];
            for (int a = 0; a < 3; ++a) {
              const int base = ijk[a] - ((ijk[a] - col[a]) % per[a] + per[a]) % per[a];
              src[a] = ijk[a] - base <= per[a] / 2 ? base : base + per[a];
              if (src[a] >= g.nodes(a) || src[a] < 0) src[a] = std::max(base, 0);  // no entry
            }
            const std::size_t s = g.index(src[0], src[1], src[2]);
            for (int a = 0; a < 3; ++a) {
              const double val = out[m](0, a);
              if (val != 0.0)
                trip.emplace_back(static_cast<int>(3 * m + a), static_cast<int>(3 * s + b), val);
            }
          }
        }
  Eigen::SparseMatrix<double> M(static_cast<Eigen::Index>(3 * nn),
                                static_cast<Eigen::Index>(3 * nn));
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

}  // namespace

double LoadProgram::at(double t) const {
  if (factor.empty()) return 0.0;
  if (t <= factor.front().first) return factor.front().second;
  for (std::size_t i = 1; i < factor.size(); ++i) {
    const auto& [t1, s1] = factor[i];
    if (t <= t1) {
      const auto& [t0, s0] = factor[i - 1];
      return t1 > t0 ? s0 + (s1 - s0) * (t - t0) / (t1 - t0) : s1;
    }
  }
  return factor.back().second;
}

void ProblemConfig::validate() const {
  const ElasticModuli& m = params.elastic;
  if (!(m.mu() > 0.0)) throw ConfigError("mu > 0 violated");
  if (!(3.0 * m.lambda() + 2.0 * m.mu() > 0.0)) throw ConfigError("3 lambda + 2 mu > 0 violated");
  if (!(params.yield.sigma0() > 0.0)) throw ConfigError("sigma0 > 0 violated");
  if (!(params.yield.sigma_hat0() > 0.0))
    throw ConfigError("sigma_hat0 > 0 violated (sigma_hat0 = 0 degenerates the spin dissipation)");
  if (params.yield.r1() < 0.0 || params.yield.r2() < 0.0) throw ConfigError("r1, r2 >= 0 violated");
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(grid.h > 0.0)) throw ConfigError("grid spacing h > 0 violated");
  for (int a = 0; a < 3; ++a)
    if (grid.cells[a] < 0) throw ConfigError("grid cells >= 0 violated");
  if (grid.dims() == 0) throw ConfigError("grid needs at least one active axis");
  if (!(stepping.dt > 0.0)) throw ConfigError("dt > 0 violated");
  if (stepping.n_steps < 0) throw ConfigError("n_steps >= 0 violated");
  for (double r : stepping.rho_schedule)
    if (!(r > 0.0)) throw ConfigError("rho > 0 violated in rho_schedule");
  if (!(fixed_point.tol_rel > 0.0) || fixed_point.tol_abs < 0.0)
    throw ConfigError("tol_outer > 0 violated");
  if (fixed_point.max_outer < 1) throw ConfigError("max_outer >= 1 violated");
  if (fixed_point.anderson_depth < 0) throw ConfigError("anderson_depth >= 0 violated");
  if (!(fixed_point.cg_tol > 0.0)) throw ConfigError("cg_tol > 0 violated");
  if (!(fixed_point.penalty > 0.0)) throw ConfigError("penalty > 0 violated");
  if (threads < 1) throw ConfigError("threads >= 1 violated");
  if (params.Lc > 0.0) {
    for (int a = 0; a < 3; ++a)
      if (grid.active(a) && grid.nodes(a) < 3)
        throw ConfigError("Lc > 0 needs at least 2 cells on every active axis");
    if (stepping.path == FlowPath::RateIndependent && params.alpha2 == 0.0)
      throw ConfigError(
          "alpha2 > 0 required on the rate-independent path with Lc > 0; use the viscoplastic "
          "path with a rho schedule");
  }
  unsigned active_faces = 0;
  for (int a = 0; a < 3; ++a)
    if (grid.active(a)) active_faces |= 3u << (2 * a);
  if (dirichlet_faces & ~active_faces) throw ConfigError("Dirichlet face on an inactive axis");
  if (micro_hard_faces & ~active_faces) throw ConfigError("micro-hard face on an inactive axis");
  if (dirichlet_faces == 0) throw ConfigError("at least one Dirichlet face is required");
}

struct Solver::DefectSolve {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  std::vector<std::uint8_t> fixed;  ///< per row-local dof (3 per node)
};

Solver::Solver(ProblemConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))),
      mask_(BoundaryMask::make(cfg_.grid, cfg_.micro_hard_faces)),
      K_(cfg_.grid, cfg_.params.elastic),
      w_(cfg_.grid.weights()) {
  if (uses_defect(cfg_.params, cfg_.grid)) {
    const double mu = cfg_.params.mu();
    const double L = cfg_.params.Lc;
    beta_ = cfg_.fixed_point.penalty * mu;
    auto d = std::make_shared<DefectSolve>();
    // Rows of p at micro-hard nodes are parallel to n: the tangential
    // components are fixed (to zero) instead of carrying the boundary stencil.
    const std::size_t nn = cfg_.grid.node_count();
    d->fixed.assign(3 * nn, 0);
    for (std::size_t n = 0; n < nn; ++n) {
      if (mask_.kind(n) != NodeKind::MicroHard) continue;
      const std::vector<Vec3> normals = mask_.hard_normals(n);
      for (int c = 0; c < 3; ++c)
        if (normals.size() >= 2 || std::abs(normals[0][c]) < 0.5) d->fixed[3 * n + c] = 1;
    }
    const Eigen::SparseMatrix<double, Eigen::RowMajor> M = curl_curl_row_matrix(cfg_.grid);
    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index r = 0; r < M.outerSize(); ++r) {
      if (d->fixed[static_cast<std::size_t>(r)]) {
        trip.emplace_back(r, r, 1.0);
        continue;
      }
      trip.emplace_back(r, r, beta_);
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator e(M, r); e; ++e)
        trip.emplace_back(r, e.col(), mu * L * L * e.value());
    }
    Eigen::SparseMatrix<double> A(M.rows(), M.cols());
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    d->lu.compute(A);
    if (d->lu.info() != Eigen::Success) throw std::runtime_error("defect operator factorization failed");
    defect_ = std::move(d);
  }
}

TensorField Solver::defect_solve(const TensorField& rhs) const {
  const std::size_t nn = rhs.size();
  TensorField out = rhs;
  Eigen::VectorXd b(static_cast<Eigen::Index>(3 * nn));
  for (int r = 0; r < 3; ++r) {
    for (std::size_t n = 0; n < nn; ++n)
      for (int c = 0; c < 3; ++c)
        b[static_cast<Eigen::Index>(3 * n + c)] = defect_->fixed[3 * n + c] ? 0.0 : rhs[n](r, c);
    const Eigen::VectorXd x = defect_->lu.solve(b);
    for (std::size_t n = 0; n < nn; ++n)
      for (int c = 0; c < 3; ++c) out[n](r, c) = x[static_cast<Eigen::Index>(3 * n + c)];
  }
  return out;
}

DirichletData Solver::dirichlet(double t) const {
  const GridSpec& g = cfg_.grid;
  DirichletData bc;
  bc.fixed.assign(3 * g.node_count(), 0);
  bc.value.assign(3 * g.node_count(), 0.0);
  const double s = cfg_.load.at(t);
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    if ((mask_.faces(n) & cfg_.dirichlet_faces) == 0) continue;
    const Vec3 x = g.position(n);
    for (int i = 0; i < 3; ++i) {
      bc.fixed[3 * n + i] = 1;
      bc.value[3 * n + i] = s * dot(cfg_.load.grad.row(i), x);
    }
  }
  return bc;
}

std::vector<double> Solver::external(double t) const {
  const double s = cfg_.load.at(t);
  Vec3 f = cfg_.load.body_force;
  for (double& x : f) x *= s;
  return K_.body_load(std::vector<Vec3>(cfg_.grid.node_count(), f));
}

double Solver::rho_at(int step) const {
  const auto& rs = cfg_.stepping.rho_schedule;
  if (rs.empty()) return cfg_.params.rho;
  return rs[std::min<std::size_t>(static_cast<std::size_t>(step), rs.size() - 1)];
}

std::vector<double> Solver::equilibrium(const TensorField& p, double t,
                                        std::vector<double> guess) const {
  const FixedPointOptions& fp = cfg_.fixed_point;
  const CgResult r = K_.solve(p, external(t), dirichlet(t), guess, fp.cg_tol, fp.cg_max_iter);
  if (!r.converged)
    throw NonConvergence("equilibrium conjugate gradient", r.iterations, r.residual);
  return guess;
}

SolutionState Solver::initial_state(const TensorField* p0) const {
  const GridSpec& g = cfg_.grid;
  SolutionState s;
  s.p = TensorField::zeros(g, mask_);
  if (p0) {
    if (!(p0->grid == g)) throw ConfigError("initial plastic distortion on a different grid");
    for (std::size_t n = 0; n < g.node_count(); ++n) s.p[n] = dev(p0->values[n]);
    if (uses_defect(cfg_.params, g)) apply_micro_hard_inplace(s.p);
  }
  s.gamma_p.assign(g.node_count(), 0.0);
  s.omega_p.assign(g.node_count(), 0.0);
  s.u = equilibrium(s.p, 0.0);
  finalize(s);
  return s;
}

void Solver::finalize(SolutionState& s) const {
  const ModelParams& mp = cfg_.params;
  const TensorField e = K_.elastic_strain_nodal(s.u, s.p);
  s.sigma = TensorField::zeros(cfg_.grid, mask_);
  for (std::size_t n = 0; n < e.size(); ++n) s.sigma[n] = apply_Ciso(mp.elastic, e[n]);
  s.Sigma_curl = TensorField::zeros(cfg_.grid, mask_);
  if (uses_defect(mp, cfg_.grid)) {
    s.Sigma_curl = curl_curl_field(s.p);
    const double k = -mp.mu() * mp.Lc * mp.Lc;
    for (auto& t : s.Sigma_curl.values) t *= k;
  }
  s.force = K_.internal_force(s.u, s.p);
}

Solver::LocalResult Solver::local_update(const SolutionState& s, const TensorField& p_lin,
                                         const std::vector<double>& u, const TensorField& back,
                                         double c, double dt, double rho) const {
  const bool defect = uses_defect(cfg_.params, cfg_.grid);
  const bool viscous = cfg_.stepping.path == FlowPath::ViscoPlastic;
  ModelParams mp = cfg_.params;
  mp.rho = rho;
  ReturnMapOptions opts;
  opts.prox_shift = c;
  const TensorField e = K_.elastic_strain_nodal(u, p_lin);

  LocalResult out;
  out.p = TensorField::zeros(cfg_.grid, mask_);
  out.gamma_p.assign(e.size(), 0.0);
  out.omega_p.assign(e.size(), 0.0);
  std::vector<double> diss(e.size(), 0.0);

  parallel_for(e.size(), cfg_.threads, [&](std::size_t n) {
    const MaterialPointState st{s.p[n], s.gamma_p[n], s.omega_p[n]};
    const Tensor3 strain = e[n] + sym(p_lin[n]);
    ReturnMapResult r;
    if (defect && mask_.kind(n) == NodeKind::MicroHard) {
      const std::vector<Vec3> normals = mask_.hard_normals(n);
      if (normals.size() >= 2) {
        out.p[n] = s.p[n];
        out.gamma_p[n] = s.gamma_p[n];
        out.omega_p[n] = s.omega_p[n];
        return;
      }
      r = constrained_return_map(st, strain, back[n], normals[0], mp, dt, viscous, opts);
    } else if (viscous) {
      r = viscoplastic_update(st, strain, back[n], mp, dt, opts);
    } else {
      r = return_map(st, strain, back[n], mp, dt, opts);
    }
    out.p[n] = r.state.p;
    out.gamma_p[n] = r.state.gamma_p;
    out.omega_p[n] = r.state.omega_p;
    diss[n] = incremental_dissipation(r.stress, r.state.p - s.p[n], r.state.gamma_p - s.gamma_p[n],
                                      r.state.omega_p - s.omega_p[n]);
  });
  out.dissipation = weighted_sum(w_, diss);
  return out;
}

EnergyReport Solver::step(SolutionState& s) const {
  const FixedPointOptions& fp = cfg_.fixed_point;
  const double dt = cfg_.stepping.dt;
  const double t1 = s.t + dt;
  const double rho = rho_at(s.step);
  const std::size_t nn = cfg_.grid.node_count();
  const bool defect = static_cast<bool>(defect_);
  const double beta = beta_;
  const double mu = cfg_.params.mu();
  const double Lc = cfg_.params.Lc;

  // Iterate x = p (Lc = 0) or x = (p, y) with y the scaled multiplier of the
  // split p = q; beta y converges to -Sigma_curl.
  const int blocks = defect ? 2 : 1;
  const Eigen::Index N = static_cast<Eigen::Index>(9 * nn * blocks);
  Eigen::VectorXd sw(N);
  for (int b = 0; b < blocks; ++b)
    for (std::size_t n = 0; n < nn; ++n)
      sw.segment(static_cast<Eigen::Index>(9 * (b * nn + n)), 9).setConstant(std::sqrt(w_[n]));

  TensorField p = s.p;
  TensorField y = TensorField::zeros(cfg_.grid, mask_);
  if (defect) {
    y = curl_curl_field(s.p);
    for (auto& t : y.values) t *= mu * Lc * Lc / beta;
    for (std::size_t n = 0; n < nn; ++n)
      for (int c = 0; c < 3; ++c)
        if (defect_->fixed[3 * n + c])
          for (int r = 0; r < 3; ++r) y[n](r, c) = 0.0;
  }
  auto pack = [&](const TensorField& a, const TensorField& b, Eigen::VectorXd& v) {
    v.resize(N);
    std::memcpy(v.data(), a.values.data(), sizeof(double) * 9 * nn);
    if (defect) std::memcpy(v.data() + 9 * nn, b.values.data(), sizeof(double) * 9 * nn);
  };
  auto unpack = [&](const Eigen::VectorXd& v, TensorField& a, TensorField& b) {
    std::memcpy(static_cast<void*>(a.values.data()), v.data(), sizeof(double) * 9 * nn);
    if (defect)
      std::memcpy(static_cast<void*>(b.values.data()), v.data() + 9 * nn, sizeof(double) * 9 * nn);
  };

  std::vector<double> u = s.u;
  TensorField back = TensorField::zeros(cfg_.grid, mask_);
  Eigen::VectorXd x, gx, f, f_prev, x_prev;
  pack(p, y, x);
  const int depth = fp.anderson_depth;
  Eigen::MatrixXd dX(N, std::max(depth, 1)), dF(N, std::max(depth, 1));
  int hist = 0;
  int head = 0;
  double best = HUGE_VAL;
  LocalResult loc;
  int it = 0;
  double res = 0.0;
  TensorField p_next = p, y_next = y;
  for (;; ++it) {
    u = equilibrium(p, t1, std::move(u));
    if (defect) {
      for (std::size_t n = 0; n < nn; ++n) back[n] = beta * (p[n] - y[n] - s.p[n]);
      loc = local_update(s, p, u, back, beta, dt, rho);
      TensorField rhs = loc.p;
      for (std::size_t n = 0; n < nn; ++n) rhs[n] = beta * (loc.p[n] + y[n]);
      p_next = defect_solve(rhs);
      for (std::size_t n = 0; n < nn; ++n) y_next[n] = y[n] + loc.p[n] - p_next[n];
    } else {
      loc = local_update(s, p, u, back, 0.0, dt, rho);
      p_next = loc.p;
    }
    pack(p_next, y_next, gx);
    f = gx - x;
    res = f.cwiseProduct(sw).norm();
    const double scale = gx.cwiseProduct(sw).norm();
    if (res <= fp.tol_rel * scale + fp.tol_abs) break;
    if (it >= fp.max_outer) throw OuterNonConvergence(s.step + 1, it, res);

    if (res > 1e3 * best) hist = head = 0;  // restart on blow-up
    best = std::min(best, res);
    if (depth > 0 && it > 0) {
      dX.col(head) = x - x_prev;
      dF.col(head) = f - f_prev;
      head = (head + 1) % depth;
      hist = std::min(hist + 1, depth);
    }
    x_prev = x;
    f_prev = f;
    if (hist > 0) {
      const Eigen::MatrixXd A = sw.asDiagonal() * dF.leftCols(hist);
      const Eigen::VectorXd g = A.completeOrthogonalDecomposition().solve(f.cwiseProduct(sw));
      x = x + f - (dX.leftCols(hist) + dF.leftCols(hist)) * g;
    } else {
      x = gx;
    }
    unpack(x, p, y);
  }

  // Accept the last local update and re-equilibrate with it.
  const std::vector<double> force_prev = s.force;
  const std::vector<double> u_prev = s.u;
  s.p = std::move(loc.p);
  s.gamma_p = std::move(loc.gamma_p);
  s.omega_p = std::move(loc.omega_p);
  s.u = equilibrium(s.p, t1, std::move(u));
  s.t = t1;
  s.step += 1;
  s.outer_iterations = it;
  finalize(s);

  EnergyReport rep = energy(s);
  double work = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i)
    work += 0.5 * (force_prev[i] + s.force[i]) * (s.u[i] - u_prev[i]);
  rep.dissipation_increment = loc.dissipation;
  rep.work_increment = work;
  s.dissipation_cum += loc.dissipation;
  s.work_cum += work;
  return rep;
}

EnergyReport Solver::energy(const SolutionState& s) const {
  const ModelParams& mp = cfg_.params;
  EnergyReport r;
  r.elastic_energy = K_.elastic_energy(s.u, s.p);
  if (uses_defect(mp, cfg_.grid)) {
    const double c = l2_norm(curl_field(s.p));
    r.defect_energy = 0.5 * mp.mu() * mp.Lc * mp.Lc * c * c;
  }
  double h = 0.0;
  for (std::size_t n = 0; n < s.gamma_p.size(); ++n)
    h += w_[n] * (mp.alpha1 * s.gamma_p[n] * s.gamma_p[n] + mp.alpha2 * s.omega_p[n] * s.omega_p[n]);
  r.hardening_energy = 0.5 * mp.mu() * h;
  r.total = r.elastic_energy + r.defect_energy + r.hardening_energy;
  return r;
}

std::vector<double> solve_equilibrium(const TensorField& p, const ProblemConfig& cfg, double t) {
  return Solver(cfg).equilibrium(p, t);
}

std::pair<SolutionState, EnergyReport> time_step(const SolutionState& s, const ProblemConfig& cfg) {
  SolutionState next = s;
  const EnergyReport r = Solver(cfg).step(next);
  return {std::move(next), r};
}

EnergyReport assemble_energy(const SolutionState& s, const ProblemConfig& cfg) {
  return Solver(cfg).energy(s);
}

double norm_skew(const TensorField& p) {
  TensorField k = p;
  for (auto& t : k.values) t = skew(t);
  return l2_norm(k);
}

StepRecord make_record(const SolutionState& s, const EnergyReport& e) {
  StepRecord r;
  r.t = s.t;
  r.energy = e;
  r.dissipation_cum = s.dissipation_cum;
  r.work_cum = s.work_cum;
  for (double g : s.gamma_p) r.max_gamma_p = std::max(r.max_gamma_p, g);
  for (double w : s.omega_p) r.max_omega_p = std::max(r.max_omega_p, w);
  r.norm_skew_p = norm_skew(s.p);
  for (const auto& t : s.p.values) r.max_trace_p = std::max(r.max_trace_p, std::abs(tr(t)));
  r.outer_iterations = s.outer_iterations;
  return r;
}

double twin_metric(const SolutionState& a, const SolutionState& b, const ProblemConfig& cfg) {
  const ModelParams& mp = cfg.params;
  const std::vector<double> w = cfg.grid.weights();
  double m = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    const Tensor3 ds = b.sigma[n] - a.sigma[n];
    const double dg = b.gamma_p[n] - a.gamma_p[n];
    const double dw = b.omega_p[n] - a.omega_p[n];
    m += w[n] * (inner(apply_Ciso_inverse(mp.elastic, ds), ds) +
                 mp.mu() * (mp.alpha1 * dg * dg + mp.alpha2 * dw * dw));
  }
  if (uses_defect(mp, cfg.grid)) {
    TensorField d = a.p;
    for (std::size_t n = 0; n < d.size(); ++n) d[n] = a.p[n] - b.p[n];
    const double c = l2_norm(curl_field(d));
    m += mp.mu() * mp.Lc * mp.Lc * c * c;
  }
  return m;
}

TensorField twin_perturbation(const ProblemConfig& cfg, double delta, std::uint64_t seed) {
  const GridSpec& g = cfg.grid;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01;
  Tensor3 T;
  for (double& v : T.a) v = N01(rng);
  T = dev(T);
  T *= 1.0 / norm(T);
  int axis = 1;
  if (!g.active(1)) axis = g.active(0) ? 0 : 2;
  const double H = g.cells[axis] * g.h;
  TensorField p = TensorField::zeros(g, BoundaryMask::make(g, cfg.micro_hard_faces));
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double y = g.position(n)[axis];
    p[n] = (delta * std::sin(std::numbers::pi * y / H)) * T;
  }
  if (cfg.params.Lc > 0.0) apply_micro_hard_inplace(p);
  return p;
}

UniquenessReport uniqueness_contraction_check(const ProblemConfig& cfg, double perturbation,
                                              std::uint64_t seed) {
  const Solver solver(cfg);
  SolutionState a = solver.initial_state();
  const TensorField p0 = twin_perturbation(cfg, perturbation, seed);
  SolutionState b = solver.initial_state(&p0);
  UniquenessReport rep;
  auto record = [&] {
    rep.t.push_back(a.t);
    rep.metric.push_back(twin_metric(a, b, cfg));
  };
  record();
  for (int k = 0; k < cfg.stepping.n_steps; ++k) {
    solver.step(a);
    solver.step(b);
    record();
  }
  double lo = HUGE_VAL;
  for (double m : rep.metric) {
    lo = std::min(lo, m);
    if (lo > 0.0) rep.max_relative_increase = std::max(rep.max_relative_increase, m / lo - 1.0);
  }
  return rep;
}

std::vector<LcStudyEntry> limit_study_Lc(const ProblemConfig& cfg,
                                         const std::vector<double>& Lc_values) {
  std::vector<LcStudyEntry> out;
  for (double L : Lc_values) {
    ProblemConfig c = cfg;
    c.params.Lc = L;
    const Solver solver(c);
    SolutionState s = solver.initial_state();
    LcStudyEntry e;
    e.Lc = L;
    for (int k = 0; k < c.stepping.n_steps; ++k) {
      solver.step(s);
      e.max_gamma_history.push_back(*std::max_element(s.gamma_p.begin(), s.gamma_p.end()));
    }
    e.norm_skew_p = norm_skew(s.p);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace gradplast
