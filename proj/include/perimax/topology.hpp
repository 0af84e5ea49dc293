#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "perimax/framework.hpp"

namespace perimax {

/// Oriented edge orbit. Half-edge 2b runs along edge orbit b, 2b+1 runs against it.
struct HalfEdge {
  int orbit = 0;
  bool forward = true;
  int origin = 0;  ///< vertex orbit of the tail copy (placed at shift 0)
  int target = 0;  ///< vertex orbit of the head copy
  Shift delta;     ///< shift of the head copy relative to the tail copy
  Vec2 direction = Vec2::Zero();
};

inline int twin(int h) { return h ^ 1; }

inline std::vector<HalfEdge> build_half_edges(const PeriodicFramework& fw) {
  std::vector<HalfEdge> out;
  out.reserve(static_cast<std::size_t>(2 * fw.m()));
  for (const auto& e : fw.edges()) {
    const Vec2 ev = fw.edge_vector(e.id);
    out.push_back({e.id, true, e.tail, e.head, e.shift, ev});
    out.push_back({e.id, false, e.head, e.tail, -e.shift, -ev});
  }
  return out;
}

/// Angle swept counter-clockwise from `from` to `to`, in (0, 2 pi].
inline double ccw_angle(const Vec2& from, const Vec2& to) {
  double a = std::atan2(cross(from, to), from.dot(to));
  if (a <= 0.0) a += 2.0 * std::numbers::pi;
  return a;
}

// ---------------------------------------------------------------------------------------------
// Non-crossing test

struct CrossingPair {
  int edge_a = 0;
  int edge_b = 0;
  Shift offset_b;  ///< translate of edge_b that meets the base copy of edge_a
};

struct NonCrossingReport {
  bool ok = true;
  std::vector<CrossingPair> crossings;
};

namespace detail {

struct SegmentCopy {
  Vec2 a, b;
  int va, vb;
  Shift sa, sb;
};

inline bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b, double eps) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  const double t = (p - a).dot(d) / len2;
  if (t < -1e-12 || t > 1.0 + 1e-12) return false;
  return (a + t * d - p).norm() <= eps;
}

/// True when the closed segments meet anywhere other than at a shared endpoint copy.
inline bool segments_conflict(const SegmentCopy& s, const SegmentCopy& t, double scale) {
  const double eps = 1e-10 * scale;
  const bool aa = s.va == t.va && s.sa == t.sa;
  const bool ab = s.va == t.vb && s.sa == t.sb;
  const bool ba = s.vb == t.va && s.sb == t.sa;
  const bool bb = s.vb == t.vb && s.sb == t.sb;
  const int shared = int(aa) + int(ab) + int(ba) + int(bb);
  if (shared >= 2) return true;
  if (shared == 1) {
    const Vec2 p = (aa || ab) ? s.a : s.b;
    const Vec2 q1 = (aa || ab) ? s.b : s.a;
    const Vec2 q2 = (aa || ba) ? t.b : t.a;
    const Vec2 u = q1 - p;
    const Vec2 v = q2 - p;
    return std::abs(cross(u, v)) <= 1e-12 * u.norm() * v.norm() && u.dot(v) > 0.0;
  }
  const double o1 = cross(s.b - s.a, t.a - s.a);
  const double o2 = cross(s.b - s.a, t.b - s.a);
  const double o3 = cross(t.b - t.a, s.a - t.a);
  const double o4 = cross(t.b - t.a, s.b - t.a);
  const double area_eps = eps * scale;
  if (((o1 > area_eps && o2 < -area_eps) || (o1 < -area_eps && o2 > area_eps)) &&
      ((o3 > area_eps && o4 < -area_eps) || (o3 < -area_eps && o4 > area_eps))) {
    return true;
  }
  return on_segment(t.a, s.a, s.b, eps) || on_segment(t.b, s.a, s.b, eps) || on_segment(s.a, t.a, t.b, eps) ||
         on_segment(s.b, t.a, t.b, eps);
}

inline SegmentCopy segment_copy(const PeriodicFramework& fw, const EdgeSpec& e, const Shift& t) {
  return {fw.copy_position(e.tail, t), fw.copy_position(e.head, t + e.shift), e.tail, e.head, t, t + e.shift};
}

/// Every translate t of `other` whose bounding box can touch the base copy of `base`.
inline std::vector<Shift> candidate_translates(const PeriodicFramework& fw, const SegmentCopy& base,
                                               const SegmentCopy& other0, double pad) {
  const Vec2 lo = base.a.cwiseMin(base.b) - other0.a.cwiseMax(other0.b) - Vec2::Constant(pad);
  const Vec2 hi = base.a.cwiseMax(base.b) - other0.a.cwiseMin(other0.b) + Vec2::Constant(pad);
  double min1 = 1e300, max1 = -1e300, min2 = 1e300, max2 = -1e300;
  for (const Vec2& corner : {lo, hi, Vec2(lo.x(), hi.y()), Vec2(hi.x(), lo.y())}) {
    const Vec2 c = fw.lattice().coordinates(corner);
    min1 = std::min(min1, c.x());
    max1 = std::max(max1, c.x());
    min2 = std::min(min2, c.y());
    max2 = std::max(max2, c.y());
  }
  std::vector<Shift> out;
  for (int c1 = static_cast<int>(std::floor(min1)) - 1; c1 <= static_cast<int>(std::ceil(max1)) + 1; ++c1) {
    for (int c2 = static_cast<int>(std::floor(min2)) - 1; c2 <= static_cast<int>(std::ceil(max2)) + 1; ++c2) {
      out.push_back({c1, c2});
    }
  }
  return out;
}

inline bool boxes_overlap(const SegmentCopy& s, const SegmentCopy& t, double pad) {
  const Vec2 slo = s.a.cwiseMin(s.b), shi = s.a.cwiseMax(s.b);
  const Vec2 tlo = t.a.cwiseMin(t.b), thi = t.a.cwiseMax(t.b);
  return slo.x() <= thi.x() + pad && tlo.x() <= shi.x() + pad && slo.y() <= thi.y() + pad && tlo.y() <= shi.y() + pad;
}

}  // namespace detail

/// Checks whether `candidate` (with all its translates) meets the edges of `fw` or its own
/// translates. `candidate_id` labels the new orbit in the report.
inline NonCrossingReport check_edge_against(const PeriodicFramework& fw, const EdgeSpec& candidate, int candidate_id) {
  NonCrossingReport rep;
  const double scale = fw.length_scale();
  const double pad = 1e-9 * scale;
  const auto base = detail::segment_copy(fw, candidate, Shift{});
  auto scan = [&](const EdgeSpec& other, int other_id, bool self) {
    const auto other0 = detail::segment_copy(fw, other, Shift{});
    for (const Shift& t : detail::candidate_translates(fw, base, other0, pad)) {
      if (self && t.is_zero()) continue;
      const auto seg = detail::segment_copy(fw, other, t);
      if (!detail::boxes_overlap(base, seg, pad)) continue;
      if (detail::segments_conflict(base, seg, scale)) {
        rep.ok = false;
        rep.crossings.push_back({candidate_id, other_id, t});
      }
    }
  };
  for (const auto& e : fw.edges()) scan({e.tail, e.head, e.shift}, e.id, false);
  scan(candidate, candidate_id, true);
  return rep;
}

/// True iff no two edge copies of the infinite framework meet except at a common endpoint.
/// Translates are enumerated from bounding boxes in lattice coordinates, so edges longer than
/// a lattice cell are covered.
inline NonCrossingReport check_noncrossing(const PeriodicFramework& fw) {
  NonCrossingReport rep;
  const double scale = fw.length_scale();
  const double pad = 1e-9 * scale;
  const auto specs = fw.edge_specs();
  for (int a = 0; a < fw.m(); ++a) {
    const auto base = detail::segment_copy(fw, specs[static_cast<std::size_t>(a)], Shift{});
    for (int b = a; b < fw.m(); ++b) {
      const auto other0 = detail::segment_copy(fw, specs[static_cast<std::size_t>(b)], Shift{});
      for (const Shift& t : detail::candidate_translates(fw, base, other0, pad)) {
        if (a == b && (t.is_zero() || !t.lex_positive())) continue;  // symmetric pairs counted once
        const auto seg = detail::segment_copy(fw, specs[static_cast<std::size_t>(b)], t);
        if (!detail::boxes_overlap(base, seg, pad)) continue;
        if (detail::segments_conflict(base, seg, scale)) {
          rep.ok = false;
          rep.crossings.push_back({a, b, t});
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------------------------
// Faces

/// A face copy: face orbit plus the lattice translate of the orbit's reference copy.
struct FaceCopy {
  int face = 0;
  Shift offset;
  friend bool operator==(const FaceCopy&, const FaceCopy&) = default;
};

struct FaceOrbit {
  int id = 0;
  std::vector<int> boundary;         ///< half-edges, counter-clockwise
  std::vector<Shift> origin_shift;   ///< shift of each half-edge's origin copy in the reference copy
  std::vector<double> angles;        ///< interior angle at each half-edge's origin
  int size() const { return static_cast<int>(boundary.size()); }
};

/// Edge orbit with the faces on either side. Along the base copy u -> v the face `to_face` (V)
/// lies to the left, `from_face` (U) to the right; the dual edge runs from U to V.
struct Tetrad {
  int edge = 0;
  FaceCopy from_face;
  FaceCopy to_face;
};

struct FaceComplex {
  std::vector<HalfEdge> half_edges;
  std::vector<int> next;            ///< successor along the face to the left
  std::vector<FaceOrbit> faces;
  std::vector<int> face_of;         ///< face orbit of each half-edge
  std::vector<Shift> face_offset;   ///< face copy holding the base copy of each half-edge
  std::vector<Tetrad> tetrads;      ///< one per edge orbit

  int face_count() const { return static_cast<int>(faces.size()); }
};

/// Outgoing half-edges at each vertex orbit, sorted counter-clockwise by direction.
inline std::vector<std::vector<int>> rotation_system(const PeriodicFramework& fw, const std::vector<HalfEdge>& hes) {
  std::vector<std::vector<int>> rot(static_cast<std::size_t>(fw.n()));
  for (int h = 0; h < static_cast<int>(hes.size()); ++h) rot[static_cast<std::size_t>(hes[static_cast<std::size_t>(h)].origin)].push_back(h);
  for (int v = 0; v < fw.n(); ++v) {
    auto& list = rot[static_cast<std::size_t>(v)];
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      const Vec2& da = hes[static_cast<std::size_t>(a)].direction;
      const Vec2& db = hes[static_cast<std::size_t>(b)].direction;
      return std::atan2(da.y(), da.x()) < std::atan2(db.y(), db.x());
    });
    for (std::size_t k = 0; k + 1 < list.size() + (list.size() > 1 ? 1 : 0); ++k) {
      const Vec2& a = hes[static_cast<std::size_t>(list[k])].direction;
      const Vec2& b = hes[static_cast<std::size_t>(list[(k + 1) % list.size()])].direction;
      if (std::abs(cross(a, b)) <= 1e-12 * a.norm() * b.norm() && a.dot(b) > 0.0) {
        throw ValidationError("degenerate placement: overlapping edges at vertex", v);
      }
    }
  }
  return rot;
}

/// Traces the face orbits of a non-crossing framework on the torus.
inline FaceComplex trace_faces(const PeriodicFramework& fw) {
  const NonCrossingReport nc = check_noncrossing(fw);
  if (!nc.ok) {
    throw ValidationError("crossing framework: edges " + std::to_string(nc.crossings.front().edge_a) + " and " +
                          std::to_string(nc.crossings.front().edge_b) + " intersect");
  }
  FaceComplex fc;
  fc.half_edges = build_half_edges(fw);
  const int nh = static_cast<int>(fc.half_edges.size());
  const auto rot = rotation_system(fw, fc.half_edges);
  std::vector<int> slot(static_cast<std::size_t>(nh));
  for (const auto& list : rot) {
    for (std::size_t k = 0; k < list.size(); ++k) slot[static_cast<std::size_t>(list[k])] = static_cast<int>(k);
  }
  fc.next.resize(static_cast<std::size_t>(nh));
  for (int h = 0; h < nh; ++h) {
    const int t = twin(h);
    const auto& list = rot[static_cast<std::size_t>(fc.half_edges[static_cast<std::size_t>(t)].origin)];
    const int k = slot[static_cast<std::size_t>(t)];
    fc.next[static_cast<std::size_t>(h)] = list[static_cast<std::size_t>((k + static_cast<int>(list.size()) - 1) % static_cast<int>(list.size()))];
  }

  fc.face_of.assign(static_cast<std::size_t>(nh), -1);
  fc.face_offset.assign(static_cast<std::size_t>(nh), Shift{});
  for (int start = 0; start < nh; ++start) {
    if (fc.face_of[static_cast<std::size_t>(start)] >= 0) continue;
    FaceOrbit face;
    face.id = static_cast<int>(fc.faces.size());
    Shift acc;
    int h = start;
    do {
      face.boundary.push_back(h);
      face.origin_shift.push_back(acc);
      fc.face_of[static_cast<std::size_t>(h)] = face.id;
      fc.face_offset[static_cast<std::size_t>(h)] = -acc;
      acc += fc.half_edges[static_cast<std::size_t>(h)].delta;
      h = fc.next[static_cast<std::size_t>(h)];
    } while (h != start);
    if (!acc.is_zero()) {
      throw ValidationError("Euler violation: face boundary does not close on the torus", face.id);
    }
    std::set<std::tuple<int, int, int>> seen;
    for (int k = 0; k < face.size(); ++k) {
      const auto& he = fc.half_edges[static_cast<std::size_t>(face.boundary[static_cast<std::size_t>(k)])];
      const Shift& s = face.origin_shift[static_cast<std::size_t>(k)];
      if (!seen.insert({he.origin, s.c1, s.c2}).second) throw ValidationError("non-simple face", face.id);
    }
    double total = 0.0;
    for (int k = 0; k < face.size(); ++k) {
      const int cur = face.boundary[static_cast<std::size_t>(k)];
      const int prev = face.boundary[static_cast<std::size_t>((k + face.size() - 1) % face.size())];
      const double a = ccw_angle(fc.half_edges[static_cast<std::size_t>(cur)].direction,
                                 -fc.half_edges[static_cast<std::size_t>(prev)].direction);
      face.angles.push_back(a);
      total += a;
    }
    if (std::abs(total - (face.size() - 2) * std::numbers::pi) > 1e-8) {
      throw ValidationError("Euler violation: face angle sum does not match a simple polygon", face.id);
    }
    fc.faces.push_back(std::move(face));
  }

  if (fw.n() - fw.m() + fc.face_count() != 0) throw ValidationError("Euler violation: n - m + n* != 0");

  for (const auto& e : fw.edges()) {
    const auto f = static_cast<std::size_t>(2 * e.id);
    const auto b = f + 1;
    fc.tetrads.push_back({e.id, {fc.face_of[b], fc.face_offset[b] + e.shift}, {fc.face_of[f], fc.face_offset[f]}});
  }
  return fc;
}

inline constexpr double kAngleTolerance = 1e-9;

struct CornerReport {
  std::vector<int> corners;      ///< per face: interior angles below pi
  std::vector<int> flat;         ///< per face: angles within tolerance of pi
  int degree_sum = 0;
  bool degree_sum_matches = false;       ///< sum d_v == 2m
  bool all_pseudo_triangles = false;     ///< every face has exactly 3 corners and no flat angle
  bool pseudo_triangle_count = false;    ///< 2m == n + 3 n* (meaningful when all faces are pseudo-triangles)
};

inline CornerReport corner_count(const FaceComplex& fc, int n) {
  CornerReport rep;
  for (const auto& f : fc.faces) {
    int corners = 0, flat = 0;
    for (double a : f.angles) {
      if (std::abs(a - std::numbers::pi) <= kAngleTolerance) {
        ++flat;
      } else if (a < std::numbers::pi) {
        ++corners;
      }
    }
    rep.corners.push_back(corners);
    rep.flat.push_back(flat);
  }
  const int m = static_cast<int>(fc.half_edges.size()) / 2;
  rep.degree_sum = static_cast<int>(fc.half_edges.size());
  rep.degree_sum_matches = rep.degree_sum == 2 * m;
  rep.all_pseudo_triangles = !fc.faces.empty();
  for (std::size_t k = 0; k < fc.faces.size(); ++k) {
    if (rep.corners[k] != 3 || rep.flat[k] != 0) rep.all_pseudo_triangles = false;
  }
  rep.pseudo_triangle_count = 2 * m == n + 3 * fc.face_count();
  return rep;
}

/// Polygon of a face copy, counter-clockwise.
inline std::vector<Vec2> face_polygon(const PeriodicFramework& fw, const FaceComplex& fc, const FaceCopy& copy) {
  const auto& f = fc.faces.at(static_cast<std::size_t>(copy.face));
  std::vector<Vec2> out;
  for (int k = 0; k < f.size(); ++k) {
    const auto& he = fc.half_edges[static_cast<std::size_t>(f.boundary[static_cast<std::size_t>(k)])];
    out.push_back(fw.copy_position(he.origin, f.origin_shift[static_cast<std::size_t>(k)] + copy.offset));
  }
  return out;
}

}  // namespace perimax
