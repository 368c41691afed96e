#pragma once

// Single material point under a prescribed strain history, backstress zero.

#include <iosfwd>
#include <vector>

#include "gradplast/config.hpp"

namespace gradplast {

struct PointRecord {
  double t = 0.0;
  Tensor3 strain;
  Tensor3 stress;
  double gamma_p = 0.0;
  double omega_p = 0.0;
  Branch branch = Branch::Interior;
  double lambda = 0.0;
  /// Yield function on the reported branch (nearest branch when elastic).
  double phi = 0.0;
};

/// Includes the initial state at t = 0.
std::vector<PointRecord> run_point_driver(const PointProgram& prog);

/// Columns: t,e11,e22,e33,e12,e13,e23,s11,s22,s33,s12,s13,s23,gamma_p,omega_p,branch,lambda,phi
void write_point_csv(std::ostream& os, const std::vector<PointRecord>& rows);

}  // namespace gradplast
