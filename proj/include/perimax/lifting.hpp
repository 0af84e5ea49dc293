#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <string>
#include <vector>

#include "perimax/io.hpp"
#include "perimax/rigidity.hpp"
#include "perimax/topology.hpp"

namespace perimax {

/// Piecewise-affine periodic height function, flat on faces.
///
/// On the reference copy of face orbit F the height is H(q) = normal[F] . q + offset[F]; the copy
/// translated by Lambda t carries offset[F] - normal[F] . (Lambda t), which makes H lattice invariant.
struct PeriodicLifting {
  std::vector<Vec2> normal;
  std::vector<double> offset;
  int base_face = 0;
  double c0 = 0.0;

  double face_offset(const PeriodicFramework& fw, const FaceCopy& f) const {
    return offset[static_cast<std::size_t>(f.face)] - normal[static_cast<std::size_t>(f.face)].dot(fw.lattice().translate(f.offset));
  }
  double height(const PeriodicFramework& fw, const FaceCopy& f, const Vec2& q) const {
    return normal[static_cast<std::size_t>(f.face)].dot(q) + face_offset(fw, f);
  }
};

inline constexpr double kLiftingTolerance = 1e-8;
inline constexpr double kCompatibilityTolerance = 1e-9;
inline constexpr double kFoldDeadBand = 1e-9;

inline double height_scale(const PeriodicFramework& fw, const PeriodicLifting& L) {
  double s = 0.0;
  for (std::size_t f = 0; f < L.normal.size(); ++f) {
    s = std::max(s, L.normal[f].norm() * fw.length_scale() + std::abs(L.offset[f]));
  }
  return s;
}

/// Largest height mismatch at edge endpoints between the two faces of each tetrad.
inline double compatibility_residual(const PeriodicFramework& fw, const FaceComplex& fc, const PeriodicLifting& L) {
  double worst = 0.0;
  for (const auto& t : fc.tetrads) {
    const auto& e = fw.edges()[static_cast<std::size_t>(t.edge)];
    for (const Vec2& p : {fw.position(e.tail), fw.copy_position(e.head, e.shift)}) {
      worst = std::max(worst, std::abs(L.height(fw, t.from_face, p) - L.height(fw, t.to_face, p)));
    }
  }
  return worst;
}

/// Stress induced by a lifting: the jump of the face normals across each edge.
inline StressVector stress_from_lifting(const PeriodicFramework& fw, const FaceComplex& fc, const PeriodicLifting& L) {
  if (static_cast<int>(L.normal.size()) != fc.face_count() || L.offset.size() != L.normal.size()) {
    throw ValidationError("incompatible lifting: face count mismatch");
  }
  const double residual = compatibility_residual(fw, fc, L);
  if (residual > kCompatibilityTolerance * std::max(1.0, height_scale(fw, L))) {
    throw ValidationError("incompatible lifting: height mismatch " + format_decimal(residual));
  }
  StressVector sv;
  sv.values = Eigen::VectorXd::Zero(fw.m());
  for (const auto& t : fc.tetrads) {
    const Vec2 e = fw.edge_vector(t.edge);
    const Vec2 jump = L.normal[static_cast<std::size_t>(t.to_face.face)] - L.normal[static_cast<std::size_t>(t.from_face.face)];
    sv.values[t.edge] = jump.dot(perp(e)) / e.squaredNorm();
  }
  const StressCheck chk = check_periodic_stress(fw, sv.values);
  sv.is_equilibrium = chk.equilibrium;
  sv.is_periodic = chk.periodic;
  return sv;
}

/// Integrates a periodic stress into a periodic lifting whose base face has offset `c0`.
///
/// Normals and offsets are propagated along a breadth-first spanning tree of the quotient dual
/// graph with the root normal left free. Every non-tree dual edge then fixes either a normal
/// jump (which must vanish) or one linear condition on the root normal through the lattice
/// offset it closes; the root normal is the least-squares solution of those conditions.
inline PeriodicLifting lifting_from_stress(const PeriodicFramework& fw, const FaceComplex& fc, const Eigen::VectorXd& s,
                                           double c0 = 0.0) {
  if (s.size() != fw.m()) throw ValidationError("stress has wrong number of entries");
  const int nf = fc.face_count();
  const double smax = s.size() ? s.cwiseAbs().maxCoeff() : 0.0;
  const double ell = fw.length_scale();

  struct Step {
    int edge;
    bool forward;  // crossing from from_face to to_face
  };
  std::vector<std::vector<Step>> adj(static_cast<std::size_t>(nf));
  for (const auto& t : fc.tetrads) {
    adj[static_cast<std::size_t>(t.from_face.face)].push_back({t.edge, true});
    adj[static_cast<std::size_t>(t.to_face.face)].push_back({t.edge, false});
  }

  // Crossing an edge from copy `src` lands on a copy of the face on the other side.
  struct Landing {
    FaceCopy copy;
    Vec2 normal;
    double offset;
  };
  auto cross_edge = [&](const Step& st, const FaceCopy& src, const Vec2& nu, double c) -> Landing {
    const Tetrad& t = fc.tetrads[static_cast<std::size_t>(st.edge)];
    const FaceCopy& near = st.forward ? t.from_face : t.to_face;
    const FaceCopy& far = st.forward ? t.to_face : t.from_face;
    const Shift k = src.offset - near.offset;
    const auto& e = fw.edges()[static_cast<std::size_t>(st.edge)];
    const Vec2 pu = fw.copy_position(e.tail, k);
    const Vec2 pv = fw.copy_position(e.head, k + e.shift);
    const double sign = st.forward ? 1.0 : -1.0;
    const double sb = sign * s[st.edge];
    return {{far.face, far.offset + k}, nu + sb * perp(pv - pu), c - sb * cross(pv, pu)};
  };

  std::vector<bool> seen(static_cast<std::size_t>(nf), false);
  std::vector<FaceCopy> reached(static_cast<std::size_t>(nf));
  std::vector<Vec2> nu_hat(static_cast<std::size_t>(nf), Vec2::Zero());
  std::vector<double> c_hat(static_cast<std::size_t>(nf), 0.0);  // offset of the reached copy

  const int root = 0;
  seen[root] = true;
  reached[root] = {root, Shift{}};
  c_hat[root] = c0;
  std::deque<int> queue{root};
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop_front();
    for (std::size_t k = 0; k < adj[static_cast<std::size_t>(f)].size(); ++k) {
      const Step& st = adj[static_cast<std::size_t>(f)][k];
      const Landing land = cross_edge(st, reached[static_cast<std::size_t>(f)], nu_hat[static_cast<std::size_t>(f)], c_hat[static_cast<std::size_t>(f)]);
      const auto g = static_cast<std::size_t>(land.copy.face);
      if (seen[g]) continue;
      seen[g] = true;
      reached[g] = land.copy;
      nu_hat[g] = land.normal;
      c_hat[g] = land.offset;
      queue.push_back(land.copy.face);
    }
  }
  for (int f = 0; f < nf; ++f) {
    if (!seen[static_cast<std::size_t>(f)]) throw ValidationError("dual graph is disconnected", f);
  }

  // Closing conditions from every dual edge crossed in its forward sense.
  std::vector<Eigen::RowVector2d> rows;
  std::vector<double> rhs;
  double nu_residual = 0.0;
  for (const auto& t : fc.tetrads) {
    const int f = t.from_face.face;
    const Landing land = cross_edge({t.edge, true}, reached[static_cast<std::size_t>(f)], nu_hat[static_cast<std::size_t>(f)], c_hat[static_cast<std::size_t>(f)]);
    const auto g = static_cast<std::size_t>(land.copy.face);
    nu_residual = std::max(nu_residual, (land.normal - nu_hat[g]).norm());
    const Vec2 d = fw.lattice().translate(land.copy.offset - reached[g].offset);
    rows.push_back(d.transpose());
    rhs.push_back(-(land.offset - c_hat[g]) - nu_hat[g].dot(d));
  }
  const double nu_scale = smax * ell;
  if (nu_residual > kLiftingTolerance * nu_scale) {
    throw NotPeriodicStress("not a periodic stress: normals do not close around a face cycle", nu_residual / std::max(nu_scale, 1e-300));
  }
  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), 2);
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    A.row(static_cast<Eigen::Index>(k)) = rows[k];
    b[static_cast<Eigen::Index>(k)] = rhs[k];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() < 2 || sv[1] <= 1e-9 * sv[0]) {
    throw NumericalError("dual cycles do not span the lattice");
  }
  const Vec2 nu0 = svd.solve(b);
  const double c_residual = (A * nu0 - b).cwiseAbs().maxCoeff();
  const double c_scale = smax * ell * ell;
  if (c_residual > kLiftingTolerance * c_scale) {
    throw NotPeriodicStress("not a periodic stress: offsets violate lattice periodicity", c_residual / std::max(c_scale, 1e-300));
  }

  PeriodicLifting L;
  L.base_face = root;
  L.c0 = c0;
  L.normal.resize(static_cast<std::size_t>(nf));
  L.offset.resize(static_cast<std::size_t>(nf));
  for (int f = 0; f < nf; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    L.normal[fi] = nu0 + nu_hat[fi];
    L.offset[fi] = c_hat[fi] + L.normal[fi].dot(fw.lattice().translate(reached[fi].offset));
  }
  return L;
}

enum class FoldClass { mountain, valley, flat };

inline const char* to_string(FoldClass c) {
  switch (c) {
    case FoldClass::mountain: return "mountain";
    case FoldClass::valley: return "valley";
    default: return "flat";
  }
}

struct EdgeFold {
  int edge = 0;
  double stress = 0.0;
  FoldClass fold = FoldClass::flat;
};

/// Negative stress folds down (mountain), positive stress folds up (valley).
inline std::vector<EdgeFold> classify_folds(const PeriodicFramework& fw, const Eigen::VectorXd& s) {
  if (s.size() != fw.m()) throw ValidationError("stress has wrong number of entries");
  const double tol = kFoldDeadBand * (s.size() ? s.cwiseAbs().maxCoeff() : 0.0);
  std::vector<EdgeFold> out;
  for (int b = 0; b < fw.m(); ++b) {
    const double v = s[b];
    out.push_back({b, v, v < -tol ? FoldClass::mountain : (v > tol ? FoldClass::valley : FoldClass::flat)});
  }
  return out;
}

/// Height of the base copy of each vertex orbit.
inline std::vector<double> vertex_heights(const PeriodicFramework& fw, const FaceComplex& fc, const PeriodicLifting& L) {
  std::vector<double> z(static_cast<std::size_t>(fw.n()), 0.0);
  std::vector<bool> done(static_cast<std::size_t>(fw.n()), false);
  for (int h = 0; h < static_cast<int>(fc.half_edges.size()); ++h) {
    const int v = fc.half_edges[static_cast<std::size_t>(h)].origin;
    if (done[static_cast<std::size_t>(v)]) continue;
    z[static_cast<std::size_t>(v)] =
        L.height(fw, {fc.face_of[static_cast<std::size_t>(h)], fc.face_offset[static_cast<std::size_t>(h)]}, fw.position(v));
    done[static_cast<std::size_t>(v)] = true;
  }
  return z;
}

/// OBJ mesh of the lifted patch: one `v` record per vertex copy in `range`, face copies fanned
/// from their first boundary vertex. Face copies reaching outside the range are omitted.
inline std::string export_terrain(const PeriodicFramework& fw, const FaceComplex& fc, const PeriodicLifting& L,
                                  const TileRange& range) {
  const FinitePatch patch = realize_patch(fw, range);
  const auto z = vertex_heights(fw, fc, L);
  std::ostringstream out;
  for (const auto& v : patch.vertices) {
    out << "v " << format_decimal(v.position.x()) << ' ' << format_decimal(v.position.y()) << ' '
        << format_decimal(z[static_cast<std::size_t>(v.orbit)]) << '\n';
  }
  for (int c2 = range.lo2; c2 < range.hi2; ++c2) {
    for (int c1 = range.lo1; c1 < range.hi1; ++c1) {
      for (const auto& f : fc.faces) {
        std::vector<int> ids;
        for (int k = 0; k < f.size(); ++k) {
          const auto& he = fc.half_edges[static_cast<std::size_t>(f.boundary[static_cast<std::size_t>(k)])];
          ids.push_back(patch.find(he.origin, f.origin_shift[static_cast<std::size_t>(k)] + Shift{c1, c2}, range, fw.n()));
        }
        if (std::find(ids.begin(), ids.end(), -1) != ids.end()) continue;
        for (std::size_t k = 1; k + 1 < ids.size(); ++k) {
          out << "f " << ids[0] + 1 << ' ' << ids[k] + 1 << ' ' << ids[k + 1] + 1 << '\n';
        }
      }
    }
  }
  return out.str();
}

}  // namespace perimax
