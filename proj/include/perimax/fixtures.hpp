#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "perimax/framework.hpp"
#include "perimax/pseudo_tri.hpp"

namespace perimax {

inline Mat2 rotation(double angle) {
  Mat2 r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

/// Unit square lattice with one vertex and the two axis edges.
inline PeriodicFramework square_grid() {
  return PeriodicFramework(Mat2::Identity(), {Vec2::Zero()}, {{0, 0, {1, 0}}, {0, 0, {0, 1}}});
}

/// Kagome framework: triangle OAB fixed, triangle OCD rotated by theta about O. Vertex orbits
/// O, A, B; the lattice generators are C - A and D - B.
inline PeriodicFramework kagome(double theta) {
  if (!(theta > -std::numbers::pi && theta < std::numbers::pi)) throw ValidationError("kagome angle out of range");
  const double h = std::sqrt(3.0) / 2.0;
  const Vec2 A(-1.0, 0.0);
  const Vec2 B(-0.5, -h);
  const Vec2 C = rotation(theta) * Vec2(1.0, 0.0);
  const Vec2 D = rotation(theta) * Vec2(0.5, h);
  Mat2 L;
  L.col(0) = C - A;
  L.col(1) = D - B;
  return PeriodicFramework(L, {Vec2::Zero(), A, B},
                           {{0, 1, {0, 0}}, {0, 2, {0, 0}}, {1, 2, {0, 0}}, {0, 1, {1, 0}}, {0, 2, {0, 1}},
                            {1, 2, {-1, 1}}});
}

/// Hexagonal cell with a vertical edge P-Q of length h and two edges of length l leaving Q at
/// angles alpha (right) and beta (left) below the horizontal. Negative angles give the convex
/// honeycomb, positive angles the reentrant one. Centrally symmetric by construction.
inline PeriodicFramework reentrant(double alpha, double beta, double h = 2.0, double l = 1.0) {
  if (!(h > 0.0 && l > 0.0)) throw ValidationError("reentrant lengths must be positive");
  Mat2 L;
  L.col(0) = Vec2(l * std::cos(alpha), h - l * std::sin(alpha));
  L.col(1) = Vec2(-l * std::cos(beta), h - l * std::sin(beta));
  return PeriodicFramework(L, {Vec2::Zero(), Vec2(0.0, h)}, {{0, 1, {0, 0}}, {1, 0, {1, 0}}, {1, 0, {0, 1}}});
}

/// Regular honeycomb, the convex member of the reentrant family.
inline PeriodicFramework honeycomb() { return reentrant(-std::numbers::pi / 6.0, -std::numbers::pi / 6.0, 1.0, 1.0); }

/// Periodic pointed pseudo-triangulation with three vertex orbits: a generic perturbation of the
/// kagome placement at theta = pi/2 (same edge orbits).
inline PeriodicFramework ppt3() {
  Mat2 L;
  L << 1.02, -0.30, 1.07, 1.41;
  return PeriodicFramework(L, {Vec2::Zero(), Vec2(-1.05, 0.08), Vec2(-0.42, -0.93)},
                           {{0, 1, {0, 0}}, {0, 2, {0, 0}}, {1, 2, {0, 0}}, {0, 1, {1, 0}}, {0, 2, {0, 1}},
                            {1, 2, {-1, 1}}});
}

/// Rhombille tiling: the projection of a stepped surface of unit cubes. The degree-6 vertex P is
/// a cube corner, Q and R carry degree 3; each face is the image of one cube face.
inline PeriodicFramework cubes() {
  const double s = std::sqrt(3.0) / 2.0;
  Mat2 L;
  L << 1.5, 0.0, s, 2.0 * s;
  return PeriodicFramework(L, {Vec2::Zero(), Vec2(1.0, 0.0), Vec2(0.5, s)},
                           {{0, 1, {0, 0}}, {0, 2, {0, 0}}, {0, 1, {-1, 1}}, {0, 2, {-1, 0}}, {0, 1, {-1, 0}},
                            {0, 2, {0, -1}}});
}

/// ppt3 plus its top-ranked rigidifying edge orbit.
inline PeriodicFramework ultrarigid() {
  const PeriodicFramework base = ppt3();
  return insert_edge_orbit(base, find_rigidifying_edges(base, kDefaultCutoff).front());
}

struct FixtureSpec {
  std::string name;
  double theta = std::numbers::pi / 2.0;  ///< kagome
  double alpha = std::numbers::pi / 6.0;  ///< reentrant
  double beta = std::numbers::pi / 6.0;   ///< reentrant
  double h = 2.0;                         ///< reentrant
  double l = 1.0;                         ///< reentrant
};

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {"square_grid", "kagome", "reentrant", "ppt3", "cubes", "ultrarigid"};
  return names;
}

inline PeriodicFramework fixture(const FixtureSpec& spec) {
  if (spec.name == "square_grid") return square_grid();
  if (spec.name == "kagome") return kagome(spec.theta);
  if (spec.name == "reentrant") return reentrant(spec.alpha, spec.beta, spec.h, spec.l);
  if (spec.name == "ppt3") return ppt3();
  if (spec.name == "cubes") return cubes();
  if (spec.name == "ultrarigid") return ultrarigid();
  throw ValidationError("unknown fixture '" + spec.name + "'");
}

}  // namespace perimax
