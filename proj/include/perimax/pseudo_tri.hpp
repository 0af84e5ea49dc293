#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "perimax/rigidity.hpp"
#include "perimax/topology.hpp"

namespace perimax {

/// Largest angle between cyclically consecutive directions; 2 pi for a single direction.
inline double max_angular_gap(const std::vector<Vec2>& directions) {
  if (directions.empty()) return 2.0 * std::numbers::pi;
  std::vector<double> angles;
  angles.reserve(directions.size());
  for (const Vec2& d : directions) angles.push_back(std::atan2(d.y(), d.x()));
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t k = 1; k < angles.size(); ++k) gap = std::max(gap, angles[k] - angles[k - 1]);
  return gap;
}

/// Directions of all edge copies incident to the base copy of vertex orbit v.
inline std::vector<Vec2> incident_directions(const PeriodicFramework& fw, int v) {
  std::vector<Vec2> out;
  for (const auto& e : fw.edges()) {
    const Vec2 ev = fw.edge_vector(e.id);
    if (e.tail == v) out.push_back(ev);
    if (e.head == v) out.push_back(-ev);
  }
  return out;
}

inline double max_angular_gap(const PeriodicFramework& fw, int v) { return max_angular_gap(incident_directions(fw, v)); }

/// Pointed: all incident edges lie in an open half-plane.
inline bool is_pointed(const std::vector<Vec2>& directions) {
  return max_angular_gap(directions) > std::numbers::pi + kAngleTolerance;
}

inline bool is_pointed(const PeriodicFramework& fw, int v) {
  if (v < 0 || v >= fw.n()) throw ValidationError("vertex index out of range", v);
  return is_pointed(incident_directions(fw, v));
}

struct PPTCertificate {
  std::vector<bool> pointed;             ///< per vertex orbit
  std::vector<bool> pseudo_triangular;   ///< per face orbit
  std::vector<int> corners;              ///< per face orbit
  int n = 0;
  int m = 0;
  int n_star = 0;
  int sigma = 0;
  int flex_dim = 0;
  bool stress_free = false;
  bool edge_count = false;  ///< m == 2n
  bool valid = false;
  std::vector<std::string> failures;
};

inline PPTCertificate certify_ppt(const PeriodicFramework& fw) {
  PPTCertificate cert;
  const FaceComplex fc = trace_faces(fw);
  const CornerReport cr = corner_count(fc, fw.n());
  const FlexSpace fs = flex_space(fw);
  cert.n = fw.n();
  cert.m = fw.m();
  cert.n_star = fc.face_count();
  cert.sigma = fs.report.sigma;
  cert.flex_dim = fs.report.phi;
  cert.stress_free = cert.sigma == 0;
  cert.edge_count = cert.m == 2 * cert.n;
  for (int v = 0; v < fw.n(); ++v) {
    cert.pointed.push_back(is_pointed(fw, v));
    if (!cert.pointed.back()) cert.failures.push_back("vertex " + std::to_string(v) + " not pointed");
  }
  for (int f = 0; f < fc.face_count(); ++f) {
    const auto fi = static_cast<std::size_t>(f);
    cert.corners.push_back(cr.corners[fi]);
    cert.pseudo_triangular.push_back(cr.corners[fi] == 3 && cr.flat[fi] == 0);
    if (cr.flat[fi] > 0) {
      cert.failures.push_back("face " + std::to_string(f) + " has a flat corner (indeterminate)");
    } else if (cr.corners[fi] != 3) {
      cert.failures.push_back("face " + std::to_string(f) + " has " + std::to_string(cr.corners[fi]) + " corners");
    }
  }
  if (!cert.edge_count) cert.failures.push_back("m != 2n");
  if (!cert.stress_free) cert.failures.push_back("sigma = " + std::to_string(cert.sigma));
  if (cert.flex_dim != 1) cert.failures.push_back("phi = " + std::to_string(cert.flex_dim));
  cert.valid = cert.failures.empty();
  return cert;
}

/// Rate of change of the length of edge (tail, head, shift) under an infinitesimal motion.
inline double length_rate(const PeriodicFramework& fw, const EdgeSpec& e, const Eigen::VectorXd& motion) {
  const int lc = lattice_column(fw);
  const Vec2 ev = fw.copy_position(e.head, e.shift) - fw.position(e.tail);
  const Vec2 dv = motion.segment<2>(2 * e.head) - motion.segment<2>(2 * e.tail) + e.shift.c1 * motion.segment<2>(lc) +
                  e.shift.c2 * motion.segment<2>(lc + 2);
  return ev.dot(dv) / ev.norm();
}

struct EdgeCandidate {
  int tail = 0;
  int head = 0;
  Shift shift;
  double rate = 0.0;  ///< length derivative under the normalized flex

  EdgeSpec spec() const { return {tail, head, shift}; }
  auto key() const { return std::make_tuple(tail, head, shift.c1, shift.c2); }
};

inline bool has_orbit(const PeriodicFramework& fw, const EdgeSpec& e) {
  return std::any_of(fw.edges().begin(), fw.edges().end(),
                     [&](const EdgeOrbit& o) { return same_orbit({o.tail, o.head, o.shift}, e); });
}

/// True when the candidate orbit can be added without duplicating or crossing anything.
inline bool insertable(const PeriodicFramework& fw, const EdgeSpec& e) {
  if (e.tail == e.head && e.shift.is_zero()) return false;
  if (has_orbit(fw, e)) return false;
  if ((fw.copy_position(e.head, e.shift) - fw.position(e.tail)).norm() <= 1e-12 * fw.length_scale()) return false;
  return check_edge_against(fw, e, fw.m()).ok;
}

inline PeriodicFramework insert_edge_orbit(const PeriodicFramework& fw, const EdgeSpec& e) {
  if (has_orbit(fw, e)) throw ValidationError("duplicate orbit");
  const NonCrossingReport rep = check_edge_against(fw, e, fw.m());
  if (!rep.ok) {
    const auto& c = rep.crossings.front();
    throw ValidationError("crossing insertion: new orbit meets edge " + std::to_string(c.edge_b) + " at shift (" +
                          std::to_string(c.offset_b.c1) + "," + std::to_string(c.offset_b.c2) + ")");
  }
  return fw.with_edge(e);
}

inline PeriodicFramework insert_edge_orbit(const PeriodicFramework& fw, const EdgeCandidate& c) {
  return insert_edge_orbit(fw, c.spec());
}

inline constexpr int kDefaultCutoff = 2;
inline constexpr double kRateThreshold = 1e-8;

/// Unit flex orthogonal to the trivial motions of a one-degree-of-freedom framework.
inline Eigen::VectorXd normalized_flex(const PeriodicFramework& fw) {
  const Eigen::MatrixXd f = nontrivial_flexes(fw);
  if (f.cols() != 1) throw ValidationError("flex space is not one-dimensional");
  return f.col(0);
}

/// Every canonical vertex pair (u, v + Lambda c), |c| <= cutoff, that is not an edge orbit and
/// does not cross the framework, with its length derivative under `flex`.
inline std::vector<EdgeCandidate> enumerate_candidates(const PeriodicFramework& fw, const Eigen::VectorXd& flex,
                                                       int cutoff) {
  std::vector<EdgeCandidate> out;
  for (int u = 0; u < fw.n(); ++u) {
    for (int v = u; v < fw.n(); ++v) {
      for (int c1 = -cutoff; c1 <= cutoff; ++c1) {
        for (int c2 = -cutoff; c2 <= cutoff; ++c2) {
          const EdgeSpec e{u, v, {c1, c2}};
          if (u == v && !e.shift.lex_positive()) continue;
          if (!insertable(fw, e)) continue;
          out.push_back({u, v, e.shift, length_rate(fw, e, flex)});
        }
      }
    }
  }
  return out;
}

/// Insertable pairs ranked by |length derivative| (ties by key). The flex sign is chosen so the
/// first candidate lengthens.
inline std::vector<EdgeCandidate> find_rigidifying_edges(const PeriodicFramework& fw, int cutoff = kDefaultCutoff) {
  const PPTCertificate cert = certify_ppt(fw);
  if (!cert.valid) throw ValidationError("not a periodic pointed pseudo-triangulation: " + cert.failures.front());
  auto all = enumerate_candidates(fw, normalized_flex(fw), cutoff);
  std::vector<EdgeCandidate> out;
  for (const auto& c : all) {
    if (std::abs(c.rate) >= kRateThreshold) out.push_back(c);
  }
  if (out.empty()) throw ValidationError("no candidate found within cutoff");
  std::sort(out.begin(), out.end(), [](const EdgeCandidate& a, const EdgeCandidate& b) {
    const double ra = std::abs(a.rate), rb = std::abs(b.rate);
    if (ra != rb) return ra > rb;
    return a.key() < b.key();
  });
  if (out.front().rate < 0.0) {
    for (auto& c : out) c.rate = -c.rate;
  }
  return out;
}

}  // namespace perimax
