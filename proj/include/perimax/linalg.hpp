#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "perimax/errors.hpp"

namespace perimax {

/// Singular values at or below this fraction of the largest one count as zero.
inline constexpr double kRankTolerance = 1e-9;

/// Smallest acceptable ratio between the smallest kept and the largest dropped singular value.
inline constexpr double kMinRankGap = 10.0;

/// SVD of a small dense matrix together with its numerical rank and both null spaces.
struct RankedSvd {
  Eigen::VectorXd singular_values;
  int rank = 0;
  double threshold = 0.0;
  /// Ratio between the smallest kept and the largest dropped singular value (infinity if none dropped).
  double gap_ratio = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd kernel;       ///< orthonormal basis of ker A (columns)
  Eigen::MatrixXd cokernel;     ///< orthonormal basis of ker A^t (columns)
};

/// Flips `v` so that its first entry of non-negligible magnitude is positive.
inline void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) > 1e-9 * scale) {
      if (v[k] < 0) v = -v;
      return;
    }
  }
}

/// Normalizes each column to unit length with the sign convention of fix_sign.
inline Eigen::MatrixXd canonical_columns(Eigen::MatrixXd basis) {
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    basis.col(c).normalize();
    fix_sign(basis.col(c));
  }
  return basis;
}

/// Dense SVD with relative rank threshold. Throws NumericalError when the singular values do
/// not separate cleanly around the threshold.
inline RankedSvd ranked_svd(const Eigen::MatrixXd& a, double rel_tol = kRankTolerance, bool check_gap = true) {
  RankedSvd out;
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  if (rows == 0 || cols == 0) {
    out.singular_values.resize(0);
    out.kernel = Eigen::MatrixXd::Identity(cols, cols);
    out.cokernel = Eigen::MatrixXd::Identity(rows, rows);
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  const double top = out.singular_values[0];
  out.threshold = rel_tol * top;
  int r = 0;
  while (r < out.singular_values.size() && top > 0.0 && out.singular_values[r] > out.threshold) ++r;
  out.rank = r;
  if (r > 0 && r < out.singular_values.size()) {
    const double dropped = out.singular_values[r];
    out.gap_ratio = dropped > 0.0 ? out.singular_values[r - 1] / dropped : std::numeric_limits<double>::infinity();
  }
  if (check_gap && out.gap_ratio < kMinRankGap) {
    throw NumericalError("rank instability: singular values straddle the tolerance band");
  }
  out.kernel = svd.matrixV().rightCols(cols - r);
  out.cokernel = svd.matrixU().rightCols(rows - r);
  return out;
}

/// Largest distance from a column of `sub` to the column span of the orthonormal `basis`.
inline double projection_residual(const Eigen::MatrixXd& sub, const Eigen::MatrixXd& basis) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < sub.cols(); ++c) {
    const Eigen::VectorXd v = sub.col(c);
    const Eigen::VectorXd rest = basis.cols() > 0 ? Eigen::VectorXd(v - basis * (basis.transpose() * v)) : v;
    worst = std::max(worst, rest.norm());
  }
  return worst;
}

}  // namespace perimax
