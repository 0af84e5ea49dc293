#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "perimax/linalg.hpp"
#include "perimax/pseudo_tri.hpp"
#include "perimax/rigidity.hpp"
#include "perimax/topology.hpp"

namespace perimax {

/// Placement of a fixed combinatorial framework: 2n position coordinates followed by the two
/// lattice columns, laid out like the columns of the rigidity matrix.
using Configuration = Eigen::VectorXd;

inline Configuration to_configuration(const PeriodicFramework& fw) {
  Configuration x(2 * fw.n() + 4);
  for (int i = 0; i < fw.n(); ++i) x.segment<2>(2 * i) = fw.position(i);
  x.segment<2>(2 * fw.n()) = fw.lattice().generator(0);
  x.segment<2>(2 * fw.n() + 2) = fw.lattice().generator(1);
  return x;
}

inline Mat2 lattice_of(const Configuration& x) {
  const Eigen::Index lc = x.size() - 4;
  Mat2 L;
  L.col(0) = x.segment<2>(lc);
  L.col(1) = x.segment<2>(lc + 2);
  return L;
}

inline PeriodicFramework at_configuration(const PeriodicFramework& fw, const Configuration& x) {
  std::vector<Vec2> pos;
  for (int i = 0; i < fw.n(); ++i) pos.push_back(x.segment<2>(2 * i));
  return fw.with_placement(lattice_of(x), std::move(pos));
}

/// Rigid motion putting vertex 0 at the origin and lambda_1 on the positive x-axis.
inline PeriodicFramework apply_gauge(const PeriodicFramework& fw) {
  const Vec2 l1 = fw.lattice().generator(0);
  const double a = -std::atan2(l1.y(), l1.x());
  Mat2 rot;
  rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  std::vector<Vec2> pos;
  for (int i = 0; i < fw.n(); ++i) pos.push_back(rot * (fw.position(i) - fw.position(0)));
  Mat2 L = rot * fw.lattice().matrix();
  L(1, 0) = 0.0;
  pos[0] = Vec2::Zero();
  return fw.with_placement(L, std::move(pos));
}

/// Squared edge lengths minus their targets, followed by the three gauge conditions.
inline Eigen::VectorXd constraint_values(const PeriodicFramework& fw, const Configuration& x,
                                         const Eigen::VectorXd& target_sq) {
  const int lc = 2 * fw.n();
  Eigen::VectorXd F(fw.m() + 3);
  for (const auto& e : fw.edges()) {
    const Vec2 ev = x.segment<2>(2 * e.head) + e.shift.c1 * x.segment<2>(lc) + e.shift.c2 * x.segment<2>(lc + 2) -
                    x.segment<2>(2 * e.tail);
    F[e.id] = ev.squaredNorm() - target_sq[e.id];
  }
  F[fw.m()] = x[0];
  F[fw.m() + 1] = x[1];
  F[fw.m() + 2] = x[lc + 1];
  return F;
}

inline Eigen::MatrixXd constraint_jacobian(const PeriodicFramework& fw, const Configuration& x) {
  const int lc = 2 * fw.n();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(fw.m() + 3, 2 * fw.n() + 4);
  for (const auto& e : fw.edges()) {
    const Vec2 ev = x.segment<2>(2 * e.head) + e.shift.c1 * x.segment<2>(lc) + e.shift.c2 * x.segment<2>(lc + 2) -
                    x.segment<2>(2 * e.tail);
    J.block<1, 2>(e.id, 2 * e.tail) -= 2.0 * ev.transpose();
    J.block<1, 2>(e.id, 2 * e.head) += 2.0 * ev.transpose();
    J.block<1, 2>(e.id, lc) += 2.0 * e.shift.c1 * ev.transpose();
    J.block<1, 2>(e.id, lc + 2) += 2.0 * e.shift.c2 * ev.transpose();
  }
  J(fw.m(), 0) = 1.0;
  J(fw.m() + 1, 1) = 1.0;
  J(fw.m() + 2, lc + 1) = 1.0;
  return J;
}

inline Eigen::VectorXd squared_lengths(const PeriodicFramework& fw) {
  Eigen::VectorXd out(fw.m());
  for (int b = 0; b < fw.m(); ++b) out[b] = fw.edge_vector(b).squaredNorm();
  return out;
}

// ---------------------------------------------------------------------------------------------
// Pair-distance rates

struct ExpansiveReport {
  bool expansive = false;
  double min_rate = 0.0;
  int pairs = 0;
  EdgeSpec worst;   ///< pair attaining min_rate
  double tolerance = 0.0;
  int cutoff = 0;   ///< only pairs with |c| <= cutoff are examined
};

/// d/dt |p_v + Lambda c - p_u|^2 for every canonical pair with |c| <= cutoff.
inline ExpansiveReport expansive_check(const PeriodicFramework& fw, const Eigen::VectorXd& tangent, int cutoff = 2) {
  if (tangent.size() != 2 * fw.n() + 4) throw ValidationError("tangent has wrong size");
  const int lc = 2 * fw.n();
  ExpansiveReport rep;
  rep.cutoff = cutoff;
  rep.min_rate = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (int u = 0; u < fw.n(); ++u) {
    for (int v = u; v < fw.n(); ++v) {
      for (int c1 = -cutoff; c1 <= cutoff; ++c1) {
        for (int c2 = -cutoff; c2 <= cutoff; ++c2) {
          const Shift c{c1, c2};
          if (u == v && !c.lex_positive()) continue;
          const Vec2 d = fw.copy_position(v, c) - fw.position(u);
          const Vec2 dd = tangent.segment<2>(2 * v) + c1 * tangent.segment<2>(lc) + c2 * tangent.segment<2>(lc + 2) -
                          tangent.segment<2>(2 * u);
          const double rate = 2.0 * d.dot(dd);
          scale = std::max(scale, std::abs(rate));
          ++rep.pairs;
          if (rate < rep.min_rate) {
            rep.min_rate = rate;
            rep.worst = {u, v, c};
          }
        }
      }
    }
  }
  rep.tolerance = 1e-9 * scale;
  rep.expansive = rep.min_rate >= -rep.tolerance;
  return rep;
}

// ---------------------------------------------------------------------------------------------
// Tangent

/// Flips `t` if that increases the smallest pair-distance rate.
inline Eigen::VectorXd orient_expansive(const PeriodicFramework& fw, Eigen::VectorXd t, int cutoff = 2) {
  const ExpansiveReport plus = expansive_check(fw, t, cutoff);
  const ExpansiveReport minus = expansive_check(fw, -t, cutoff);
  if (minus.min_rate > plus.min_rate) t = -t;
  return t;
}

inline Eigen::VectorXd gauge_kernel(const PeriodicFramework& fw, const Configuration& x) {
  const RankedSvd svd = ranked_svd(constraint_jacobian(fw, x));
  if (svd.kernel.cols() != 1) {
    throw ValidationError("not one-dimensional: gauge-reduced flex space has dimension " +
                          std::to_string(svd.kernel.cols()));
  }
  return svd.kernel.col(0).normalized();
}

/// Unit generator of the gauge-reduced flex space at the framework's own placement, which must
/// satisfy the gauge. Oriented so the smallest pair-distance rate is as large as possible.
inline Eigen::VectorXd flex_tangent(const PeriodicFramework& fw, int cutoff = 2) {
  return orient_expansive(fw, gauge_kernel(fw, to_configuration(fw)), cutoff);
}

// ---------------------------------------------------------------------------------------------
// Gram matrix

inline Mat2 gram(const Mat2& lattice) { return lattice.transpose() * lattice; }

inline Mat2 lattice_velocity(const Eigen::VectorXd& tangent) { return lattice_of(tangent); }

inline Mat2 gram_derivative(const Mat2& lattice, const Mat2& velocity) {
  const Mat2 d = velocity.transpose() * lattice + lattice.transpose() * velocity;
  return 0.5 * (d + d.transpose());
}

inline Mat2 gram_derivative(const Configuration& x, const Eigen::VectorXd& tangent) {
  return gram_derivative(lattice_of(x), lattice_velocity(tangent));
}

inline bool auxetic_tangent_check(const Mat2& dgram) {
  const Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (dgram + dgram.transpose()));
  const Vec2 ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  return ev.minCoeff() >= -1e-9 * scale;
}

struct ContractionReport {
  double norm = 0.0;
  bool contraction = false;
};

/// T = L1 L2^{-1} maps the later lattice onto the earlier one.
inline ContractionReport contraction_check(const Mat2& earlier, const Mat2& later) {
  const LatticeBasis check(later);
  const Mat2 T = earlier * later.inverse();
  const double norm = Eigen::JacobiSVD<Mat2>(T).singularValues()[0];
  return {norm, norm <= 1.0 + 1e-9};
}

// ---------------------------------------------------------------------------------------------
// Continuation

inline constexpr double kCorrectorTolerance = 1e-12;
inline constexpr int kCorrectorIterations = 20;
inline constexpr double kMinStep = 1e-6;
inline constexpr double kEventTolerance = 1e-10;

/// Newton on the length and gauge constraints plus the pseudo-arclength condition
/// t . (x - prediction) = 0. Returns nothing when it fails to converge.
inline std::optional<Configuration> correct(const PeriodicFramework& fw, const Eigen::VectorXd& target_sq,
                                            const Configuration& prediction, const Eigen::VectorXd& t) {
  const double scale = std::max(1.0, target_sq.maxCoeff());
  const double xscale = std::max(1.0, prediction.cwiseAbs().maxCoeff());
  Configuration x = prediction;
  const Eigen::Index dim = x.size();
  const Eigen::Index rows = fw.m() + 3;
  Eigen::MatrixXd A(rows + 1, dim);
  Eigen::VectorXd G(rows + 1);
  for (int it = 0; it < kCorrectorIterations; ++it) {
    G.head(rows) = constraint_values(fw, x, target_sq);
    G[rows] = t.dot(x - prediction);
    const double res = G.head(rows).cwiseAbs().maxCoeff() / scale;
    if (!std::isfinite(res)) return std::nullopt;
    A.topRows(rows) = constraint_jacobian(fw, x);
    A.row(rows) = t.transpose();
    const Eigen::VectorXd dx = A.colPivHouseholderQr().solve(G);
    x -= dx;
    if (res <= kCorrectorTolerance && dx.cwiseAbs().maxCoeff() <= 1e-13 * xscale) return x;
  }
  const double res = constraint_values(fw, x, target_sq).cwiseAbs().maxCoeff() / scale;
  if (!(res <= kCorrectorTolerance)) return std::nullopt;
  return x;
}

/// Signs of (max angular gap - pi) per vertex and (angle - pi) per face corner slot. A change of
/// any sign is a pseudo-triangulation boundary event.
struct BoundaryState {
  std::vector<double> vertex_gap;  ///< max gap minus pi
  std::vector<double> face_angle;  ///< angle minus pi, faces concatenated

  static BoundaryState at(const PeriodicFramework& fw, const FaceComplex& fc, const Configuration& x) {
    const PeriodicFramework g = at_configuration(fw, x);
    BoundaryState s;
    for (int v = 0; v < g.n(); ++v) s.vertex_gap.push_back(max_angular_gap(g, v) - std::numbers::pi);
    for (const auto& f : fc.faces) {
      for (int k = 0; k < f.size(); ++k) {
        const int cur = f.boundary[static_cast<std::size_t>(k)];
        const int prev = f.boundary[static_cast<std::size_t>((k + f.size() - 1) % f.size())];
        const Vec2 out_dir = (fc.half_edges[static_cast<std::size_t>(cur)].forward ? 1.0 : -1.0) *
                             g.edge_vector(fc.half_edges[static_cast<std::size_t>(cur)].orbit);
        const Vec2 in_dir = (fc.half_edges[static_cast<std::size_t>(prev)].forward ? 1.0 : -1.0) *
                            g.edge_vector(fc.half_edges[static_cast<std::size_t>(prev)].orbit);
        s.face_angle.push_back(ccw_angle(out_dir, -in_dir) - std::numbers::pi);
      }
    }
    return s;
  }

  /// Empty when no sign changed relative to `ref`; otherwise the event name.
  std::string event_since(const BoundaryState& ref) const {
    for (std::size_t v = 0; v < vertex_gap.size(); ++v) {
      if ((vertex_gap[v] > kAngleTolerance) != (ref.vertex_gap[v] > kAngleTolerance)) return "pointedness lost";
    }
    for (std::size_t k = 0; k < face_angle.size(); ++k) {
      if ((face_angle[k] < -kAngleTolerance) != (ref.face_angle[k] < -kAngleTolerance)) return "corner lost";
    }
    return {};
  }
};

struct PathSample {
  double tau = 0.0;
  Configuration config;
  Mat2 gram = Mat2::Zero();
  Mat2 dgram = Mat2::Zero();
  Eigen::VectorXd tangent;
  std::optional<bool> expansive;
  std::optional<double> min_rate;
  std::optional<bool> auxetic;
  double length_drift = 0.0;  ///< max relative deviation of edge lengths from the start
  std::string event;          ///< nonempty on the sample placed at a boundary event
};

struct DeformationPath {
  std::vector<PathSample> samples;
  std::string termination;
  int cutoff = 2;
};

struct ContinuationOptions {
  int steps = 100;
  double ds = 1e-2;
  int cutoff = 2;
  bool stop_at_event = true;
  bool require_ppt = true;
  /// Optional starting direction; the tangent sign is matched to it.
  std::optional<Eigen::VectorXd> direction;
};

namespace detail {

inline double length_drift(const PeriodicFramework& fw, const Configuration& x, const Eigen::VectorXd& target_sq) {
  const PeriodicFramework g = at_configuration(fw, x);
  double worst = 0.0;
  for (int b = 0; b < g.m(); ++b) {
    const double l0 = std::sqrt(target_sq[b]);
    worst = std::max(worst, std::abs(g.edge_vector(b).norm() - l0) / l0);
  }
  return worst;
}

}  // namespace detail

/// Traces the one-parameter deformation through the gauge-fixed placement of `fw` with a
/// predictor-corrector scheme in arclength tau. The first sample is the starting placement.
inline DeformationPath continue_path(const PeriodicFramework& input, const ContinuationOptions& opt = {}) {
  if (opt.steps < 0) throw ValidationError("steps must be non-negative");
  if (!(opt.ds > 0.0)) throw ValidationError("ds must be positive");
  if (opt.require_ppt) {
    const PPTCertificate cert = certify_ppt(input);
    if (!cert.valid) throw ValidationError("not a periodic pointed pseudo-triangulation: " + cert.failures.front());
  }
  const PeriodicFramework fw = apply_gauge(input);
  const FaceComplex fc = trace_faces(fw);
  const Eigen::VectorXd target_sq = squared_lengths(fw);

  DeformationPath path;
  path.cutoff = opt.cutoff;
  auto make_sample = [&](double tau, const Configuration& x, const Eigen::VectorXd& t, bool verdicts) {
    PathSample s;
    s.tau = tau;
    s.config = x;
    s.tangent = t;
    s.gram = gram(lattice_of(x));
    s.dgram = gram_derivative(x, t);
    s.length_drift = detail::length_drift(fw, x, target_sq);
    if (verdicts) {
      const ExpansiveReport er = expansive_check(at_configuration(fw, x), t, opt.cutoff);
      s.expansive = er.expansive;
      s.min_rate = er.min_rate;
      s.auxetic = auxetic_tangent_check(s.dgram);
    }
    return s;
  };

  Configuration x = to_configuration(fw);
  Eigen::VectorXd t = gauge_kernel(fw, x);
  if (opt.direction) {
    if (t.dot(*opt.direction) < 0.0) t = -t;
  } else {
    t = orient_expansive(fw, t, opt.cutoff);
  }
  path.samples.push_back(make_sample(0.0, x, t, opt.steps > 0));
  if (opt.steps == 0) {
    path.termination = "step count";
    return path;
  }

  BoundaryState ref = BoundaryState::at(fw, fc, x);
  double tau = 0.0;
  double h = opt.ds;
  for (int step = 0; step < opt.steps; ++step) {
    std::optional<Configuration> next;
    while (!(next = correct(fw, target_sq, x + h * t, t))) {
      h *= 0.5;
      if (h < kMinStep) {
        path.termination = "corrector divergence";
        return path;
      }
    }
    const BoundaryState state = BoundaryState::at(fw, fc, *next);
    std::string event = state.event_since(ref);
    if (!event.empty()) {
      // Bisect the step length to locate the boundary.
      double lo = 0.0, hi = h;
      Configuration inside = x;
      Configuration outside = *next;
      while (hi - lo > kEventTolerance) {
        const double mid = 0.5 * (lo + hi);
        const auto probe = correct(fw, target_sq, x + mid * t, t);
        if (!probe) break;
        if (BoundaryState::at(fw, fc, *probe).event_since(ref).empty()) {
          lo = mid;
          inside = *probe;
        } else {
          hi = mid;
          outside = *probe;
        }
      }
      event = BoundaryState::at(fw, fc, outside).event_since(ref);
      Eigen::VectorXd te = gauge_kernel(fw, inside);
      if (te.dot(t) < 0.0) te = -te;
      PathSample s = make_sample(tau + lo, inside, te, true);
      s.event = event;
      path.samples.push_back(std::move(s));
      if (opt.stop_at_event) {
        path.termination = event;
        return path;
      }
      ref = state;
    }
    Eigen::VectorXd tn = gauge_kernel(fw, *next);
    if (tn.dot(t) < 0.0) tn = -tn;
    x = *next;
    t = tn;
    tau += h;
    path.samples.push_back(make_sample(tau, x, t, true));
    h = std::min(opt.ds, 2.0 * h);
  }
  path.termination = "step count";
  return path;
}

/// Central difference of the Gram matrix along the curve through `x` in direction `t`.
inline Mat2 gram_finite_difference(const PeriodicFramework& gauged, const Configuration& x, const Eigen::VectorXd& t,
                                   double h = 1e-5) {
  const Eigen::VectorXd target_sq = squared_lengths(at_configuration(gauged, x));
  const auto plus = correct(gauged, target_sq, x + h * t, t);
  const auto minus = correct(gauged, target_sq, x - h * t, t);
  if (!plus || !minus) throw NumericalError("corrector divergence in finite-difference probe");
  return (gram(lattice_of(*plus)) - gram(lattice_of(*minus))) / (2.0 * h);
}

}  // namespace perimax
