#pragma once

// Node-based tensor fields on a uniform structured grid, the row-wise
// Curl / Div / Curl Curl difference operators, the micro-hard boundary
// projection and field snapshot IO.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "gradplast/tensor.hpp"

namespace gradplast {

class GridTooSmall : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class BoundaryViolation : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniform grid. cells[a] == 0 makes axis a inactive (a single node layer,
/// no derivatives along it), so 1-D and 2-D problems use the same code.
struct GridSpec {
  int cells[3] = {1, 1, 1};
  double h = 1.0;

  static GridSpec make(int nx, int ny, int nz, double h);

  int nodes(int axis) const { return cells[axis] + 1; }
  bool active(int axis) const { return cells[axis] > 0; }
  int dims() const { return active(0) + active(1) + active(2); }
  std::size_t node_count() const {
    return static_cast<std::size_t>(nodes(0)) * nodes(1) * nodes(2);
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(nodes(0)) * (static_cast<std::size_t>(j) +
                                                 static_cast<std::size_t>(nodes(1)) * k);
  }
  void coords(std::size_t n, int& i, int& j, int& k) const {
    i = static_cast<int>(n % nodes(0));
    const std::size_t r = n / nodes(0);
    j = static_cast<int>(r % nodes(1));
    k = static_cast<int>(r / nodes(1));
  }
  Vec3 position(std::size_t n) const {
    int i, j, k;
    coords(n, i, j, k);
    return {i * h, j * h, k * h};
  }
  /// Domain measure over the active axes.
  double volume() const;
  /// Trapezoidal quadrature weight of node n (product over active axes).
  double weight(std::size_t n) const;
  std::vector<double> weights() const;

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.cells[0] == b.cells[0] && a.cells[1] == b.cells[1] && a.cells[2] == b.cells[2] &&
           a.h == b.h;
  }
};

/// Faces of the box, numbered 2 * axis + (0 for the low side, 1 for high).
enum Face : int { XLo = 0, XHi = 1, YLo = 2, YHi = 3, ZLo = 4, ZHi = 5 };

Vec3 face_normal(int face);

enum class NodeKind : std::uint8_t { Interior, MicroHard, MicroFree };

/// Per-node boundary flags. A boundary node is MicroHard when it touches any
/// micro-hard face; its normals are those of the hard faces it touches.
class BoundaryMask {
 public:
  BoundaryMask() = default;
  /// hard_faces: bit f set means face f carries p x n = 0.
  static BoundaryMask make(const GridSpec& g, unsigned hard_faces);

  NodeKind kind(std::size_t n) const { return kind_.at(n); }
  /// Bitset of boundary faces (of active axes) touched by node n.
  unsigned faces(std::size_t n) const { return faces_.at(n); }
  /// Outward unit normals of the micro-hard faces at node n.
  std::vector<Vec3> hard_normals(std::size_t n) const;
  unsigned hard_faces() const { return hard_; }
  std::size_t size() const { return kind_.size(); }

 private:
  std::vector<NodeKind> kind_;
  std::vector<std::uint8_t> faces_;
  unsigned hard_ = 0;
};

struct TensorField {
  GridSpec grid;
  std::vector<Tensor3> values;
  BoundaryMask mask;

  static TensorField zeros(const GridSpec& g, const BoundaryMask& m = {});
  Tensor3& operator[](std::size_t n) { return values[n]; }
  const Tensor3& operator[](std::size_t n) const { return values[n]; }
  std::size_t size() const { return values.size(); }
};

struct VectorField {
  GridSpec grid;
  std::vector<Vec3> values;

  static VectorField zeros(const GridSpec& g);
};

/// Row-wise curl: row i of the result is curl of row i of F.
/// Second-order central differences inside, second-order one-sided at the
/// boundary. Needs at least 3 nodes on every active axis.
TensorField curl_field(const TensorField& f);

/// Row-wise divergence with the same stencils.
VectorField div_field(const TensorField& f);

/// Fused Curl Curl = grad div - Laplacian, applied row-wise. Mixed
/// derivatives are products of first-difference operators; pure second
/// derivatives use the 3-point stencil inside and a 4-point one-sided
/// stencil at the boundary (3-point when only 3 nodes exist).
TensorField curl_curl_field(const TensorField& f);

/// Row-wise gradient of a vector field: (grad v)_ij = d_j v_i.
TensorField grad_field(const VectorField& v);

/// Projects micro-hard nodes onto {F x n = 0, tr F = 0}: F = a (x) n with
/// a = F n - (F n . n) n. Nodes touching two or more hard faces are set to 0.
TensorField apply_micro_hard(const TensorField& f);
void apply_micro_hard_inplace(TensorField& f);

/// max over micro-hard nodes of |F x n| (row-wise cross products).
double micro_hard_violation(const TensorField& f);

/// Discrete L2 norm with trapezoidal weights.
double l2_norm(const TensorField& f);
double l2_norm(const VectorField& v);
double l2_inner(const TensorField& a, const TensorField& b);

/// |F|_L2 / (|sym F|_L2 + |Curl F|_L2) for a trace-free field with F x n = 0
/// on the whole boundary. Throws BoundaryViolation otherwise.
double korn_incompatible_ratio(const TensorField& f, double tol = 1e-10);

// Snapshots. CSV columns: x,y,z,p11,p12,p13,p21,p22,p23,p31,p32,p33 with
// x,y,z the integer node indices. Binary: "TFLD", u32 version (1),
// u32 nodes per axis (3x), f64 h, then node-ordered 9 f64 per node, x fastest,
// all little-endian.
void write_snapshot_csv(const TensorField& f, std::ostream& os);
void write_snapshot_binary(const TensorField& f, std::ostream& os);
TensorField read_snapshot_binary(std::istream& is);

}  // namespace gradplast
