#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <compare>
#include <numeric>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "perimax/errors.hpp"

namespace perimax {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Integer lattice coordinates of a translation, in the basis of the lattice generators.
struct Shift {
  int c1 = 0;
  int c2 = 0;

  constexpr Shift operator+(const Shift& o) const { return {c1 + o.c1, c2 + o.c2}; }
  constexpr Shift operator-(const Shift& o) const { return {c1 - o.c1, c2 - o.c2}; }
  constexpr Shift operator-() const { return {-c1, -c2}; }
  constexpr Shift& operator+=(const Shift& o) {
    c1 += o.c1;
    c2 += o.c2;
    return *this;
  }
  constexpr bool is_zero() const { return c1 == 0 && c2 == 0; }
  /// Lexicographically positive: first nonzero coordinate is > 0.
  constexpr bool lex_positive() const { return c1 > 0 || (c1 == 0 && c2 > 0); }
  constexpr int max_abs() const { return std::max(c1 < 0 ? -c1 : c1, c2 < 0 ? -c2 : c2); }

  friend constexpr auto operator<=>(const Shift&, const Shift&) = default;
};

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Quarter turn (x, y) -> (-y, x).
inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

/// Generators of the periodicity lattice stored as matrix columns.
class LatticeBasis {
 public:
  static constexpr double kSingularTolerance = 1e-12;

  LatticeBasis() : columns_(Mat2::Identity()) {}

  explicit LatticeBasis(const Mat2& columns) : columns_(columns) {
    if (!columns.allFinite()) throw ValidationError("singular lattice: non-finite entry");
    const double scale = std::max(columns.col(0).squaredNorm(), columns.col(1).squaredNorm());
    if (!(std::abs(columns.determinant()) >= kSingularTolerance * scale) || scale == 0.0) {
      throw ValidationError("singular lattice");
    }
  }

  const Mat2& matrix() const { return columns_; }
  Vec2 generator(int j) const { return columns_.col(j); }
  Vec2 translate(const Shift& c) const { return columns_.col(0) * c.c1 + columns_.col(1) * c.c2; }
  /// Coordinates of a planar vector in the generator basis (real valued).
  Vec2 coordinates(const Vec2& v) const { return columns_.partialPivLu().solve(v); }
  double max_generator_norm() const {
    return std::max(columns_.col(0).norm(), columns_.col(1).norm());
  }

 private:
  Mat2 columns_;
};

struct VertexOrbit {
  int id = 0;
  Vec2 position = Vec2::Zero();
};

/// Edge orbit running from the tail representative to the head representative translated by `shift`.
struct EdgeOrbit {
  int id = 0;
  int tail = 0;
  int head = 0;
  Shift shift;
};

/// Edge orbit as supplied by a caller, before canonicalization and id assignment.
struct EdgeSpec {
  int tail = 0;
  int head = 0;
  Shift shift;
};

/// Puts an edge in canonical form: tail <= head, and for loops a lexicographically positive shift.
inline EdgeSpec canonical_edge(EdgeSpec e) {
  if (e.tail > e.head || (e.tail == e.head && !e.shift.lex_positive())) {
    std::swap(e.tail, e.head);
    e.shift = -e.shift;
  }
  return e;
}

inline bool same_orbit(const EdgeSpec& a, const EdgeSpec& b) {
  const EdgeSpec ca = canonical_edge(a);
  const EdgeSpec cb = canonical_edge(b);
  return ca.tail == cb.tail && ca.head == cb.head && ca.shift == cb.shift;
}

/// A planar periodic bar-and-joint framework given by its quotient data.
///
/// Instances are validated on construction and immutable afterwards. Edge orbits are stored in
/// canonical form; their ids follow input order.
class PeriodicFramework {
 public:
  PeriodicFramework(const Mat2& lattice, std::vector<Vec2> positions, const std::vector<EdgeSpec>& edges)
      : lattice_(lattice) {
    if (positions.empty()) throw ValidationError("framework has no vertices");
    if (edges.empty()) throw ValidationError("framework has no edges");
    vertices_.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (!positions[i].allFinite()) throw ValidationError("non-finite vertex position", static_cast<int>(i));
      vertices_.push_back({static_cast<int>(i), positions[i]});
    }
    edges_.reserve(edges.size());
    for (std::size_t b = 0; b < edges.size(); ++b) {
      const int id = static_cast<int>(b);
      const EdgeSpec& raw = edges[b];
      if (raw.tail < 0 || raw.head < 0 || raw.tail >= n() || raw.head >= n()) {
        throw ValidationError("edge endpoint out of range", id);
      }
      if (raw.tail == raw.head && raw.shift.is_zero()) throw ValidationError("degenerate edge orbit", id);
      const EdgeSpec c = canonical_edge(raw);
      edges_.push_back({id, c.tail, c.head, c.shift});
    }
    validate();
  }

  int n() const { return static_cast<int>(vertices_.size()); }
  int m() const { return static_cast<int>(edges_.size()); }
  const LatticeBasis& lattice() const { return lattice_; }
  const std::vector<VertexOrbit>& vertices() const { return vertices_; }
  const std::vector<EdgeOrbit>& edges() const { return edges_; }
  const Vec2& position(int i) const { return vertices_.at(static_cast<std::size_t>(i)).position; }

  std::vector<Vec2> positions() const {
    std::vector<Vec2> out;
    out.reserve(vertices_.size());
    for (const auto& v : vertices_) out.push_back(v.position);
    return out;
  }

  std::vector<EdgeSpec> edge_specs() const {
    std::vector<EdgeSpec> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back({e.tail, e.head, e.shift});
    return out;
  }

  /// Position of the copy of vertex orbit `i` translated by `c`.
  Vec2 copy_position(int i, const Shift& c) const { return position(i) + lattice_.translate(c); }

  /// Edge vector x_head + Lambda c - x_tail.
  Vec2 edge_vector(int edge) const {
    if (edge < 0 || edge >= m()) throw ValidationError("edge index out of range", edge);
    const EdgeOrbit& e = edges_[static_cast<std::size_t>(edge)];
    return copy_position(e.head, e.shift) - position(e.tail);
  }

  /// Largest edge length or lattice generator norm; the natural length scale of the placement.
  double length_scale() const {
    double s = lattice_.max_generator_norm();
    for (int b = 0; b < m(); ++b) s = std::max(s, edge_vector(b).norm());
    return s;
  }

  /// Same combinatorics, new placement. The result is validated again.
  PeriodicFramework with_placement(const Mat2& lattice, std::vector<Vec2> positions) const {
    if (static_cast<int>(positions.size()) != n()) throw ValidationError("placement size mismatch");
    return PeriodicFramework(lattice, std::move(positions), edge_specs());
  }

  /// Same placement with an extra edge orbit appended (id m()).
  PeriodicFramework with_edge(const EdgeSpec& e) const {
    auto specs = edge_specs();
    specs.push_back(e);
    return PeriodicFramework(lattice_.matrix(), positions(), specs);
  }

 private:
  void validate() const {
    const double scale = lattice_.max_generator_norm();
    const double tiny = 1e-12 * scale;

    for (const auto& e : edges_) {
      if (edge_vector(e.id).norm() <= tiny) throw ValidationError("zero-length edge orbit", e.id);
    }
    // Duplicate orbits, compared in canonical form.
    std::vector<std::pair<std::tuple<int, int, int, int>, int>> keys;
    keys.reserve(edges_.size());
    for (const auto& e : edges_) keys.push_back({{e.tail, e.head, e.shift.c1, e.shift.c2}, e.id});
    std::sort(keys.begin(), keys.end());
    for (std::size_t k = 1; k < keys.size(); ++k) {
      if (keys[k].first == keys[k - 1].first) throw ValidationError("duplicate edge orbit", keys[k].second);
    }
    // Two vertex orbits placed on the same lattice coset would make the placement non-injective.
    for (int i = 0; i < n(); ++i) {
      for (int j = i + 1; j < n(); ++j) {
        const Vec2 coords = lattice_.coordinates(position(j) - position(i));
        const Shift nearest{static_cast<int>(std::lround(coords.x())), static_cast<int>(std::lround(coords.y()))};
        const Vec2 gap = position(j) - position(i) - lattice_.translate(nearest);
        if (gap.norm() <= tiny) throw ValidationError("coincident vertex orbits", j);
      }
    }
    // Connectivity of the quotient multigraph.
    std::vector<int> parent(static_cast<std::size_t>(n()));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
      }
      return x;
    };
    for (const auto& e : edges_) parent[static_cast<std::size_t>(find(e.tail))] = find(e.head);
    for (int i = 1; i < n(); ++i) {
      if (find(i) != find(0)) throw ValidationError("disconnected quotient graph", i);
    }
  }

  LatticeBasis lattice_;
  std::vector<VertexOrbit> vertices_;
  std::vector<EdgeOrbit> edges_;
};

/// Half-open box of lattice translations [lo1, hi1) x [lo2, hi2).
struct TileRange {
  int lo1 = 0;
  int hi1 = 1;
  int lo2 = 0;
  int hi2 = 1;

  bool empty() const { return hi1 <= lo1 || hi2 <= lo2; }
  bool contains(const Shift& c) const { return c.c1 >= lo1 && c.c1 < hi1 && c.c2 >= lo2 && c.c2 < hi2; }
  int count() const { return empty() ? 0 : (hi1 - lo1) * (hi2 - lo2); }
};

/// Finite piece of the infinite framework.
struct FinitePatch {
  struct Vertex {
    int orbit = 0;
    Shift shift;
    Vec2 position = Vec2::Zero();
  };
  struct Edge {
    int orbit = 0;
    int a = 0;  ///< index into vertices
    int b = 0;
  };
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;

  /// Index of the copy (orbit, shift), or -1 when it is outside the patch.
  int find(int orbit, const Shift& c, const TileRange& range, int n) const {
    if (!range.contains(c)) return -1;
    const int w = range.hi1 - range.lo1;
    return ((c.c2 - range.lo2) * w + (c.c1 - range.lo1)) * n + orbit;
  }
};

/// Materializes every vertex copy with shift in `range` and every edge copy whose two ends are present.
inline FinitePatch realize_patch(const PeriodicFramework& fw, const TileRange& range) {
  if (range.empty()) throw ValidationError("empty tile range");
  FinitePatch patch;
  patch.vertices.reserve(static_cast<std::size_t>(range.count() * fw.n()));
  for (int c2 = range.lo2; c2 < range.hi2; ++c2) {
    for (int c1 = range.lo1; c1 < range.hi1; ++c1) {
      for (int i = 0; i < fw.n(); ++i) {
        patch.vertices.push_back({i, Shift{c1, c2}, fw.copy_position(i, Shift{c1, c2})});
      }
    }
  }
  for (int c2 = range.lo2; c2 < range.hi2; ++c2) {
    for (int c1 = range.lo1; c1 < range.hi1; ++c1) {
      const Shift t{c1, c2};
      for (const auto& e : fw.edges()) {
        const int a = patch.find(e.tail, t, range, fw.n());
        const int b = patch.find(e.head, t + e.shift, range, fw.n());
        if (a >= 0 && b >= 0) patch.edges.push_back({e.id, a, b});
      }
    }
  }
  return patch;
}

}  // namespace perimax
