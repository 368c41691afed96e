#include "gradplast/field.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

#include "gradplast/simd/kernels.hpp"

namespace gradplast {

GridSpec GridSpec::make(int nx, int ny, int nz, double h) {
  if (nx < 0 || ny < 0 || nz < 0) throw std::invalid_argument("grid: cell counts must be >= 0");
  if (!(h > 0.0)) throw std::invalid_argument("grid: spacing h must be positive");
  GridSpec g;
  g.cells[0] = nx;
  g.cells[1] = ny;
  g.cells[2] = nz;
  g.h = h;
  if (g.dims() == 0) throw std::invalid_argument("grid: at least one axis must be active");
  return g;
}

double GridSpec::volume() const {
  double v = 1.0;
  for (int a = 0; a < 3; ++a)
    if (active(a)) v *= cells[a] * h;
  return v;
}

namespace {

double axis_weight(const GridSpec& g, int axis, int i) {
  if (!g.active(axis)) return 1.0;
  return (i == 0 || i == g.cells[axis]) ? 0.5 * g.h : g.h;
}

}  // namespace

double GridSpec::weight(std::size_t n) const {
  int i, j, k;
  coords(n, i, j, k);
  return axis_weight(*this, 0, i) * axis_weight(*this, 1, j) * axis_weight(*this, 2, k);
}

std::vector<double> GridSpec::weights() const {
  std::vector<double> w(node_count());
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = weight(n);
  return w;
}

Vec3 face_normal(int face) {
  Vec3 n{0.0, 0.0, 0.0};
  n[face / 2] = (face % 2 == 0) ? -1.0 : 1.0;
  return n;
}

BoundaryMask BoundaryMask::make(const GridSpec& g, unsigned hard_faces) {
  BoundaryMask m;
  const std::size_t N = g.node_count();
  m.kind_.assign(N, NodeKind::Interior);
  m.faces_.assign(N, 0);
  for (int a = 0; a < 3; ++a)
    if (!g.active(a)) hard_faces &= ~(3u << (2 * a));
  m.hard_ = hard_faces;
  for (std::size_t n = 0; n < N; ++n) {
    int idx[3];
    g.coords(n, idx[0], idx[1], idx[2]);
    unsigned f = 0;
    for (int a = 0; a < 3; ++a) {
      if (!g.active(a)) continue;
      if (idx[a] == 0) f |= 1u << (2 * a);
      if (idx[a] == g.cells[a]) f |= 1u << (2 * a + 1);
    }
    m.faces_[n] = static_cast<std::uint8_t>(f);
    if (f == 0) continue;
    m.kind_[n] = (f & hard_faces) ? NodeKind::MicroHard : NodeKind::MicroFree;
  }
  return m;
}

std::vector<Vec3> BoundaryMask::hard_normals(std::size_t n) const {
  std::vector<Vec3> out;
  const unsigned f = faces_.at(n) & hard_;
  for (int face = 0; face < 6; ++face)
    if (f & (1u << face)) out.push_back(face_normal(face));
  return out;
}

TensorField TensorField::zeros(const GridSpec& g, const BoundaryMask& m) {
  TensorField f;
  f.grid = g;
  f.values.assign(g.node_count(), Tensor3::zero());
  f.mask = m.size() == g.node_count() ? m : BoundaryMask::make(g, 0);
  return f;
}

VectorField VectorField::zeros(const GridSpec& g) {
  VectorField v;
  v.grid = g;
  v.values.assign(g.node_count(), Vec3{0.0, 0.0, 0.0});
  return v;
}

namespace {

using Scalars = std::vector<double>;

std::size_t stride(const GridSpec& g, int axis) {
  if (axis == 0) return 1;
  if (axis == 1) return static_cast<std::size_t>(g.nodes(0));
  return static_cast<std::size_t>(g.nodes(0)) * g.nodes(1);
}

void require_nodes(const GridSpec& g, int min_nodes, const char* op) {
  for (int a = 0; a < 3; ++a)
    if (g.active(a) && g.nodes(a) < min_nodes)
      throw GridTooSmall(std::string(op) + ": need at least " + std::to_string(min_nodes) +
                         " nodes on every active axis");
}

// Calls fn(n0, s, len) for every grid line along axis.
template <class Fn>
void for_each_line(const GridSpec& g, int axis, Fn&& fn) {
  const int b = (axis + 1) % 3;
  const int c = (axis + 2) % 3;
  const std::size_t s = stride(g, axis);
  const int len = g.nodes(axis);
  for (int jc = 0; jc < g.nodes(c); ++jc)
    for (int jb = 0; jb < g.nodes(b); ++jb) {
      int idx[3];
      idx[axis] = 0;
      idx[b] = jb;
      idx[c] = jc;
      fn(g.index(idx[0], idx[1], idx[2]), s, len);
    }
}

// d/dx_axis, second order everywhere.
Scalars diff1(const Scalars& f, const GridSpec& g, int axis) {
  Scalars out(f.size(), 0.0);
  if (!g.active(axis)) return out;
  const double ih = 0.5 / g.h;
  for_each_line(g, axis, [&](std::size_t n0, std::size_t s, int len) {
    auto at = [&](int i) { return f[n0 + i * s]; };
    out[n0] = ih * (-3.0 * at(0) + 4.0 * at(1) - at(2));
    for (int i = 1; i + 1 < len; ++i) out[n0 + i * s] = ih * (at(i + 1) - at(i - 1));
    const int e = len - 1;
    out[n0 + e * s] = ih * (3.0 * at(e) - 4.0 * at(e - 1) + at(e - 2));
  });
  return out;
}

// d2/dx_axis^2.
Scalars diff2(const Scalars& f, const GridSpec& g, int axis) {
  Scalars out(f.size(), 0.0);
  if (!g.active(axis)) return out;
  const double ih2 = 1.0 / (g.h * g.h);
  for_each_line(g, axis, [&](std::size_t n0, std::size_t s, int len) {
    auto at = [&](int i) { return f[n0 + i * s]; };
    const int e = len - 1;
    for (int i = 1; i < e; ++i) out[n0 + i * s] = ih2 * (at(i - 1) - 2.0 * at(i) + at(i + 1));
    if (len >= 4) {
      out[n0] = ih2 * (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3));
      out[n0 + e * s] = ih2 * (2.0 * at(e) - 5.0 * at(e - 1) + 4.0 * at(e - 2) - at(e - 3));
    } else {
      out[n0] = ih2 * (at(0) - 2.0 * at(1) + at(2));
      out[n0 + e * s] = ih2 * (at(e) - 2.0 * at(e - 1) + at(e - 2));
    }
  });
  return out;
}

Scalars component(const TensorField& f, int i, int j) {
  Scalars s(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) s[n] = f[n](i, j);
  return s;
}

// Levi-Civita pairs: curl_i = d_{j} v_{k} - d_{k} v_{j} for (i, j, k) cyclic.
constexpr int kCyc[3][2] = {{1, 2}, {2, 0}, {0, 1}};

}  // namespace

TensorField curl_field(const TensorField& f) {
  const GridSpec& g = f.grid;
  require_nodes(g, 3, "curl");
  TensorField out = TensorField::zeros(g, f.mask);
  for (int r = 0; r < 3; ++r) {
    std::array<Scalars, 3> v;
    for (int k = 0; k < 3; ++k) v[k] = component(f, r, k);
    for (int i = 0; i < 3; ++i) {
      const int j = kCyc[i][0];
      const int k = kCyc[i][1];
      const Scalars a = diff1(v[k], g, j);
      const Scalars b = diff1(v[j], g, k);
      for (std::size_t n = 0; n < f.size(); ++n) out[n](r, i) = a[n] - b[n];
    }
  }
  return out;
}

VectorField div_field(const TensorField& f) {
  const GridSpec& g = f.grid;
  require_nodes(g, 3, "div");
  VectorField out = VectorField::zeros(g);
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) {
      if (!g.active(k)) continue;
      const Scalars d = diff1(component(f, r, k), g, k);
      for (std::size_t n = 0; n < f.size(); ++n) out.values[n][r] += d[n];
    }
  return out;
}

TensorField grad_field(const VectorField& v) {
  const GridSpec& g = v.grid;
  require_nodes(g, 3, "grad");
  TensorField out = TensorField::zeros(g);
  for (int i = 0; i < 3; ++i) {
    Scalars s(v.values.size());
    for (std::size_t n = 0; n < s.size(); ++n) s[n] = v.values[n][i];
    for (int j = 0; j < 3; ++j) {
      if (!g.active(j)) continue;
      const Scalars d = diff1(s, g, j);
      for (std::size_t n = 0; n < s.size(); ++n) out[n](i, j) = d[n];
    }
  }
  return out;
}

TensorField curl_curl_field(const TensorField& f) {
  const GridSpec& g = f.grid;
  require_nodes(g, 3, "curl curl");
  TensorField out = TensorField::zeros(g, f.mask);
  const std::size_t N = f.size();
  for (int r = 0; r < 3; ++r) {
    std::array<Scalars, 3> v;
    for (int k = 0; k < 3; ++k) v[k] = component(f, r, k);
    // (curl curl v)_i = sum_{k != i} (d_i d_k v_k - d_k d_k v_i); the k = i
    // terms of grad div and the Laplacian cancel.
    std::array<Scalars, 3> dk;
    for (int k = 0; k < 3; ++k) dk[k] = diff1(v[k], g, k);
    for (int i = 0; i < 3; ++i) {
      Scalars acc(N, 0.0);
      for (int k = 0; k < 3; ++k) {
        if (k == i || !g.active(k)) continue;
        const Scalars lap = diff2(v[i], g, k);
        for (std::size_t n = 0; n < N; ++n) acc[n] -= lap[n];
        if (g.active(i)) {
          const Scalars mixed = diff1(dk[k], g, i);
          for (std::size_t n = 0; n < N; ++n) acc[n] += mixed[n];
        }
      }
      for (std::size_t n = 0; n < N; ++n) out[n](r, i) = acc[n];
    }
  }
  return out;
}

namespace {

Tensor3 project_micro_hard(const Tensor3& F, const std::vector<Vec3>& normals) {
  if (normals.empty()) return F;
  if (normals.size() > 1) return Tensor3::zero();
  const Vec3& n = normals[0];
  Vec3 a{0.0, 0.0, 0.0};
  for (int i = 0; i < 3; ++i) a[i] = dot(F.row(i), n);
  const double an = dot(a, n);
  for (int i = 0; i < 3; ++i) a[i] -= an * n[i];
  return outer(a, n);
}

}  // namespace

void apply_micro_hard_inplace(TensorField& f) {
  if (f.mask.size() != f.size()) return;
  for (std::size_t n = 0; n < f.size(); ++n)
    if (f.mask.kind(n) == NodeKind::MicroHard) f[n] = project_micro_hard(f[n], f.mask.hard_normals(n));
}

TensorField apply_micro_hard(const TensorField& f) {
  TensorField out = f;
  apply_micro_hard_inplace(out);
  return out;
}

double micro_hard_violation(const TensorField& f) {
  double worst = 0.0;
  if (f.mask.size() != f.size()) return worst;
  for (std::size_t n = 0; n < f.size(); ++n) {
    if (f.mask.kind(n) != NodeKind::MicroHard) continue;
    for (const Vec3& nv : f.mask.hard_normals(n))
      for (int i = 0; i < 3; ++i) worst = std::max(worst, norm(cross(f[n].row(i), nv)));
  }
  return worst;
}

double l2_norm(const TensorField& f) {
  if (f.values.empty()) return 0.0;
  const std::vector<double> w = f.grid.weights();
  const std::span<const double> x(f.values.front().a.data(), 9 * f.size());
  return std::sqrt(simd::block_weighted_sumsq(w, x, 9));
}

double l2_norm(const VectorField& v) {
  if (v.values.empty()) return 0.0;
  const std::vector<double> w = v.grid.weights();
  const std::span<const double> x(v.values.front().data(), 3 * v.values.size());
  return std::sqrt(simd::block_weighted_sumsq(w, x, 3));
}

double l2_inner(const TensorField& a, const TensorField& b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += a.grid.weight(n) * inner(a[n], b[n]);
  return s;
}

double korn_incompatible_ratio(const TensorField& f, double tol) {
  const GridSpec& g = f.grid;
  double scale = 1.0;
  for (const auto& t : f.values) scale = std::max(scale, norm(t));
  for (std::size_t n = 0; n < f.size(); ++n) {
    if (std::abs(tr(f[n])) > tol * scale)
      throw BoundaryViolation("korn ratio: field is not trace free");
    int idx[3];
    g.coords(n, idx[0], idx[1], idx[2]);
    for (int a = 0; a < 3; ++a) {
      if (!g.active(a)) continue;
      for (int side = 0; side < 2; ++side) {
        if (idx[a] != (side == 0 ? 0 : g.cells[a])) continue;
        const Vec3 nv = face_normal(2 * a + side);
        for (int i = 0; i < 3; ++i)
          if (norm(cross(f[n].row(i), nv)) > tol * scale)
            throw BoundaryViolation("korn ratio: F x n = 0 violated on the boundary");
      }
    }
  }
  TensorField s = f;
  for (auto& t : s.values) t = sym(t);
  const double num = l2_norm(f);
  const double den = l2_norm(s) + l2_norm(curl_field(f));
  return den > 0.0 ? num / den : 0.0;
}

void write_snapshot_csv(const TensorField& f, std::ostream& os) {
  os << "x,y,z,p11,p12,p13,p21,p22,p23,p31,p32,p33\n";
  char buf[32];
  for (std::size_t n = 0; n < f.size(); ++n) {
    int i, j, k;
    f.grid.coords(n, i, j, k);
    os << i << ',' << j << ',' << k;
    for (double v : f[n].a) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << ',' << buf;
    }
    os << '\n';
  }
}

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot IO assumes little endian");
static_assert(sizeof(Tensor3) == 9 * sizeof(double), "fields are read as flat double arrays");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw std::runtime_error("snapshot: truncated input");
  return v;
}

}  // namespace

void write_snapshot_binary(const TensorField& f, std::ostream& os) {
  os.write("TFLD", 4);
  put<std::uint32_t>(os, 1);
  for (int a = 0; a < 3; ++a) put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.nodes(a)));
  put<double>(os, f.grid.h);
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.size() * 9 * sizeof(double)));
}

TensorField read_snapshot_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "TFLD", 4) != 0)
    throw std::runtime_error("snapshot: bad magic");
  if (get<std::uint32_t>(is) != 1) throw std::runtime_error("snapshot: unsupported version");
  int cells[3];
  for (int& c : cells) c = static_cast<int>(get<std::uint32_t>(is)) - 1;
  const double h = get<double>(is);
  TensorField f = TensorField::zeros(GridSpec::make(cells[0], cells[1], cells[2], h));
  if (!is.read(reinterpret_cast<char*>(f.values.data()),
               static_cast<std::streamsize>(f.size() * 9 * sizeof(double))))
    throw std::runtime_error("snapshot: truncated input");
  return f;
}

}  // namespace gradplast
