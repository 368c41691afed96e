#pragma once

// YAML problem and point-driver configuration. Every constraint violation is
// reported with its constraint name and the source line of the offending key.

#include <string>
#include <vector>

#include "gradplast/solver.hpp"

namespace gradplast {

struct ConfigDiagnostic {
  std::string constraint;
  std::string message;
  int line = 0;  ///< 1-based, 0 when unknown

  std::string to_string() const;
};

/// Thrown by the loaders; carries every diagnostic found.
class ConfigInvalid : public std::invalid_argument {
 public:
  explicit ConfigInvalid(std::vector<ConfigDiagnostic> d);
  const std::vector<ConfigDiagnostic>& diagnostics() const { return diag_; }

 private:
  std::vector<ConfigDiagnostic> diag_;
};

/// A parsed problem document. `scenario` is empty unless the document names one.
struct ProblemDocument {
  std::string scenario;
  ProblemConfig config;
  int snapshot_every = 0;  ///< 0: final snapshot only
};

/// Parses a problem document. Keys missing from the text keep the values of
/// `defaults`, so scenario configs can be overridden partially.
ProblemDocument parse_problem(const std::string& text, const ProblemConfig& defaults);
ProblemDocument load_problem(const std::string& path, const ProblemConfig& defaults);

/// The `scenario` key of a document, or "" (syntax errors throw ConfigInvalid).
std::string peek_scenario(const std::string& text);
/// Whether the document has a `point` section.
bool is_point_document(const std::string& text);
std::string read_config_file(const std::string& path);

/// Strain path for the single-point driver: strain(t) = s(t) E with the
/// factor table of `factor`, backstress zero.
struct PointProgram {
  ModelParams params;
  Tensor3 strain;
  std::vector<std::pair<double, double>> factor{{0.0, 0.0}, {1.0, 1.0}};
  double dt = 0.01;
  int n_steps = 100;
  FlowPath path = FlowPath::RateIndependent;
};

PointProgram parse_point(const std::string& text);
PointProgram load_point(const std::string& path);

/// Face bit from its name (xlo, xhi, ylo, yhi, zlo, zhi); -1 if unknown.
int face_from_name(const std::string& name);

}  // namespace gradplast
