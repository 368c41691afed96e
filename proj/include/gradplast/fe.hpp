#pragma once

// Q1 finite elements for the equilibrium problem Div C(sym grad u - sym p) + f = 0
// on the structured grid. Displacements live at grid nodes (3 dofs per node),
// the plastic distortion is interpolated from nodes to Gauss points.

#include <cstdint>
#include <span>
#include <vector>

#include "gradplast/field.hpp"
#include "gradplast/tensor.hpp"

namespace gradplast {

struct DirichletData {
  std::vector<std::uint8_t> fixed;  ///< per dof
  std::vector<double> value;        ///< per dof, used where fixed
};

struct CgResult {
  int iterations = 0;
  double residual = 0.0;  ///< final preconditioned-free residual / initial residual
  bool converged = false;
};

class ElasticityOperator {
 public:
  ElasticityOperator(const GridSpec& g, const ElasticModuli& m);

  const GridSpec& grid() const { return grid_; }
  std::size_t dofs() const { return 3 * grid_.node_count(); }

  /// out = K u
  void apply(std::span<const double> u, std::span<double> out) const;
  std::vector<double> diagonal() const;
  /// int grad N : C sym p
  std::vector<double> plastic_load(const TensorField& p) const;
  /// Lumped (trapezoidal) body force load.
  std::vector<double> body_load(const std::vector<Vec3>& f) const;
  /// K u - plastic_load(p): the internal force vector.
  std::vector<double> internal_force(std::span<const double> u, const TensorField& p) const;

  /// Solves the constrained system with Jacobi-preconditioned CG, starting
  /// from u (Dirichlet entries are overwritten). Relative tolerance on the
  /// residual of the free dofs.
  CgResult solve(const TensorField& p, const std::vector<double>& external,
                 const DirichletData& bc, std::vector<double>& u, double tol, int max_iter) const;

  /// Nodal sym grad u - sym p recovered by weighted averaging of the Gauss
  /// point values; the weights make the nodal stress the exact derivative of
  /// the elastic energy with respect to the nodal plastic distortion.
  TensorField elastic_strain_nodal(std::span<const double> u, const TensorField& p) const;

  /// int 1/2 <C e, e> with e = sym grad u - sym p, Gauss quadrature.
  double elastic_energy(std::span<const double> u, const TensorField& p) const;

 private:
  struct Element {
    std::size_t nodes[8];
  };
  template <class Fn>
  void for_each_element(Fn&& fn) const;

  GridSpec grid_;
  ElasticModuli mod_;
  int nen_ = 0;  // nodes per element
  int nq_ = 0;   // Gauss points per element
  double wq_ = 0.0;
  std::vector<double> N_;   // nq x nen
  std::vector<double> dN_;  // nq x nen x 3
  std::vector<double> Ke_;  // (3 nen)^2
  std::vector<double> w_node_;
};

}  // namespace gradplast
