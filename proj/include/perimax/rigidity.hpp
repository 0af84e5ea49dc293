#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "perimax/framework.hpp"
#include "perimax/linalg.hpp"

namespace perimax {

/// Column of the first lattice entry in the rigidity matrix.
inline int lattice_column(const PeriodicFramework& fw) { return 2 * fw.n(); }

/// Periodic rigidity matrix: one row per edge orbit, 2n vertex columns followed by the
/// four lattice columns (d lambda_1, d lambda_2).
inline Eigen::MatrixXd rigidity_matrix(const PeriodicFramework& fw) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(fw.m(), 2 * fw.n() + 4);
  const int lc = lattice_column(fw);
  for (const auto& e : fw.edges()) {
    const Vec2 ev = fw.edge_vector(e.id);
    r.block<1, 2>(e.id, 2 * e.tail) -= ev.transpose();
    r.block<1, 2>(e.id, 2 * e.head) += ev.transpose();
    r.block<1, 2>(e.id, lc) = e.shift.c1 * ev.transpose();
    r.block<1, 2>(e.id, lc + 2) = e.shift.c2 * ev.transpose();
  }
  return r;
}

/// Vertex-orbit equilibrium conditions: 2n rows, one column per edge orbit. This is the vertex
/// block of R^t.
inline Eigen::MatrixXd equilibrium_matrix(const PeriodicFramework& fw) {
  return rigidity_matrix(fw).leftCols(2 * fw.n()).transpose();
}

/// Two translations and the infinitesimal rotation (acting on positions and lattice alike).
inline Eigen::MatrixXd trivial_motions(const PeriodicFramework& fw) {
  const int dim = 2 * fw.n() + 4;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, 3);
  for (int i = 0; i < fw.n(); ++i) {
    t(2 * i, 0) = 1.0;
    t(2 * i + 1, 1) = 1.0;
    t.block<2, 1>(2 * i, 2) = perp(fw.position(i));
  }
  const int lc = lattice_column(fw);
  t.block<2, 1>(lc, 2) = perp(fw.lattice().generator(0));
  t.block<2, 1>(lc + 2, 2) = perp(fw.lattice().generator(1));
  return t;
}

struct SpectralReport {
  int rank = 0;
  int sigma = 0;  ///< dimension of the periodic stress space
  int delta = 0;  ///< dimension of the space of infinitesimal periodic motions
  int phi = 0;    ///< non-trivial flexes, delta - 3
  Eigen::VectorXd singular_values;
  double gap_ratio = 0.0;
};

struct FlexSpace {
  Eigen::MatrixXd basis;  ///< orthonormal columns spanning ker R
  SpectralReport report;
};

inline SpectralReport spectral_report(const PeriodicFramework& fw, const RankedSvd& svd) {
  SpectralReport rep;
  rep.rank = svd.rank;
  rep.delta = 2 * fw.n() + 4 - svd.rank;
  rep.sigma = fw.m() - svd.rank;
  rep.phi = rep.delta - 3;
  rep.singular_values = svd.singular_values;
  rep.gap_ratio = svd.gap_ratio;
  return rep;
}

inline FlexSpace flex_space(const PeriodicFramework& fw) {
  const RankedSvd svd = ranked_svd(rigidity_matrix(fw));
  return {canonical_columns(svd.kernel), spectral_report(fw, svd)};
}

/// Component of the flex space orthogonal to the trivial motions (orthonormal columns).
inline Eigen::MatrixXd nontrivial_flexes(const PeriodicFramework& fw) {
  const FlexSpace fs = flex_space(fw);
  const int dim = 2 * fw.n() + 4;
  const Eigen::MatrixXd triv = Eigen::HouseholderQR<Eigen::MatrixXd>(trivial_motions(fw)).householderQ() *
                               Eigen::MatrixXd::Identity(dim, 3);
  const Eigen::MatrixXd reduced = fs.basis - triv * (triv.transpose() * fs.basis);
  const int phi = std::max(0, fs.report.phi);
  Eigen::JacobiSVD<Eigen::MatrixXd> dec(reduced, Eigen::ComputeThinU);
  return canonical_columns(dec.matrixU().leftCols(phi));
}

/// Stress values on edge orbits with their classification.
struct StressVector {
  Eigen::VectorXd values;
  bool is_equilibrium = false;
  bool is_periodic = false;
  /// Values are stored per edge orbit, so invariance under the lattice holds by representation.
  static constexpr bool is_gamma_invariant = true;
};

/// Residuals of the equilibrium and lattice conditions for a candidate stress.
struct StressCheck {
  bool periodic = false;
  bool equilibrium = false;
  Eigen::VectorXd vertex_residual;  ///< 2n entries
  Mat2 lattice_residual = Mat2::Zero();  ///< column j: sum s c^j e
  Mat2 tensor_residual = Mat2::Zero();   ///< sum s (Lambda c) (x) e
  bool tensor_periodic = false;
  double tolerance = 0.0;
  bool forms_agree() const { return periodic == tensor_periodic; }
};

inline constexpr double kStressTolerance = 1e-9;

inline StressCheck check_periodic_stress(const PeriodicFramework& fw, const Eigen::VectorXd& s) {
  if (s.size() != fw.m()) throw ValidationError("stress has wrong number of entries");
  StressCheck out;
  out.vertex_residual = Eigen::VectorXd::Zero(2 * fw.n());
  double lmax = 0.0;
  int cmax = 0;
  for (const auto& e : fw.edges()) {
    const Vec2 ev = fw.edge_vector(e.id);
    const double sb = s[e.id];
    out.vertex_residual.segment<2>(2 * e.tail) -= sb * ev;
    out.vertex_residual.segment<2>(2 * e.head) += sb * ev;
    out.lattice_residual.col(0) += sb * e.shift.c1 * ev;
    out.lattice_residual.col(1) += sb * e.shift.c2 * ev;
    out.tensor_residual += sb * fw.lattice().translate(e.shift) * ev.transpose();
    lmax = std::max(lmax, ev.norm());
    cmax = std::max(cmax, e.shift.max_abs());
  }
  const double smax = s.size() > 0 ? s.cwiseAbs().maxCoeff() : 0.0;
  out.tolerance = kStressTolerance * smax * lmax * fw.m();
  const double lattice_tol = out.tolerance * std::max(1, cmax);
  const double tensor_tol = lattice_tol * fw.lattice().max_generator_norm();
  out.equilibrium = out.vertex_residual.cwiseAbs().maxCoeff() <= out.tolerance;
  out.periodic = out.equilibrium && out.lattice_residual.cwiseAbs().maxCoeff() <= lattice_tol;
  out.tensor_periodic = out.equilibrium && out.tensor_residual.cwiseAbs().maxCoeff() <= tensor_tol;
  return out;
}

inline std::vector<StressVector> basis_to_stresses(const PeriodicFramework& fw, const Eigen::MatrixXd& basis) {
  std::vector<StressVector> out;
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    StressVector sv;
    sv.values = basis.col(c);
    const StressCheck chk = check_periodic_stress(fw, sv.values);
    sv.is_equilibrium = chk.equilibrium;
    sv.is_periodic = chk.periodic;
    out.push_back(std::move(sv));
  }
  return out;
}

/// Basis of ker R^t, i.e. the periodic stresses.
inline std::vector<StressVector> periodic_stress_space(const PeriodicFramework& fw) {
  const RankedSvd svd = ranked_svd(rigidity_matrix(fw));
  return basis_to_stresses(fw, canonical_columns(svd.cokernel));
}

/// Basis of the invariant equilibrium stresses (null space of the vertex block of R^t).
inline std::vector<StressVector> invariant_equilibrium_stress_space(const PeriodicFramework& fw) {
  const RankedSvd svd = ranked_svd(equilibrium_matrix(fw));
  return basis_to_stresses(fw, canonical_columns(svd.kernel));
}

inline Eigen::MatrixXd stress_matrix(const std::vector<StressVector>& basis, int m) {
  Eigen::MatrixXd out(m, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t c = 0; c < basis.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = basis[c].values;
  return out;
}

struct CountReport {
  int n = 0;
  int m = 0;
  int sigma = 0;
  int delta = 0;
  int phi = 0;
  bool stress_flex_identity = false;  ///< sigma - delta == m - 2n - 4
  bool flex_identity = false;         ///< sigma == phi - 1 + (m - 2n)
  double gap_ratio = 0.0;
};

/// Computes sigma from R^t and delta from R independently and checks both count identities.
inline CountReport count_identity_check(const PeriodicFramework& fw) {
  const Eigen::MatrixXd r = rigidity_matrix(fw);
  const RankedSvd row = ranked_svd(r);
  const RankedSvd col = ranked_svd(r.transpose());
  CountReport rep;
  rep.n = fw.n();
  rep.m = fw.m();
  rep.delta = static_cast<int>(row.kernel.cols());
  rep.sigma = static_cast<int>(col.kernel.cols());
  rep.phi = rep.delta - 3;
  rep.gap_ratio = std::min(row.gap_ratio, col.gap_ratio);
  rep.stress_flex_identity = rep.sigma - rep.delta == rep.m - 2 * rep.n - 4;
  rep.flex_identity = rep.sigma == rep.phi - 1 + (rep.m - 2 * rep.n);
  return rep;
}

}  // namespace perimax
