#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "perimax/rigidity.hpp"

namespace perimax {

/// Finite-index sublattice with generators a lambda_1 + b lambda_2 and d lambda_2.
/// Canonical form: a, d >= 1 and 0 <= b < d, so every sublattice has exactly one representation.
struct Sublattice {
  int a = 1;
  int b = 0;
  int d = 1;

  int index() const { return a * d; }

  /// Columns are the new generators in the old basis.
  Eigen::Matrix2i matrix() const {
    Eigen::Matrix2i M;
    M << a, 0, b, d;
    return M;
  }

  std::string label() const {
    return "[[" + std::to_string(a) + "," + std::to_string(b) + "],[0," + std::to_string(d) + "]]";
  }

  friend bool operator==(const Sublattice&, const Sublattice&) = default;

  /// Canonical form of the sublattice spanned by the columns of any nonsingular integer matrix.
  static Sublattice from_matrix(const Eigen::Matrix2i& M) {
    long long u1 = M(0, 0), u2 = M(1, 0), v1 = M(0, 1), v2 = M(1, 1);
    if (u1 * v2 - u2 * v1 == 0) throw ValidationError("singular sublattice matrix");
    while (v1 != 0) {
      const long long q = u1 / v1;
      u1 -= q * v1;
      u2 -= q * v2;
      std::swap(u1, v1);
      std::swap(u2, v2);
    }
    if (u1 < 0) {
      u1 = -u1;
      u2 = -u2;
    }
    if (v2 < 0) v2 = -v2;
    long long b = u2 % v2;
    if (b < 0) b += v2;
    return {static_cast<int>(u1), static_cast<int>(b), static_cast<int>(v2)};
  }
};

inline Sublattice compose(const Sublattice& s1, const Sublattice& s2) {
  return Sublattice::from_matrix(s1.matrix() * s2.matrix());
}

/// All sublattices of index k, ordered by a then b.
inline std::vector<Sublattice> sublattices_of_index(int k) {
  if (k < 1) throw ValidationError("sublattice index must be positive");
  std::vector<Sublattice> out;
  for (int a = 1; a <= k; ++a) {
    if (k % a != 0) continue;
    const int d = k / a;
    for (int b = 0; b < d; ++b) out.push_back({a, b, d});
  }
  return out;
}

namespace detail {

inline int floor_div(int x, int y) {
  int q = x / y;
  if ((x % y != 0) && ((x < 0) != (y < 0))) --q;
  return q;
}

}  // namespace detail

/// Coset representative of an integer vector modulo the sublattice, with 0 <= r1 < a, 0 <= r2 < d.
inline Shift reduce(const Sublattice& S, const Shift& x) {
  const int q = detail::floor_div(x.c1, S.a);
  const int y = x.c2 - q * S.b;
  return {x.c1 - q * S.a, y - detail::floor_div(y, S.d) * S.d};
}

inline int coset_index(const Sublattice& S, const Shift& r) { return r.c1 * S.d + r.c2; }

inline Shift coset_representative(const Sublattice& S, int idx) { return {idx / S.d, idx % S.d}; }

/// Framework with relaxed periodicity. Vertex orbit (i, r) has index i * rho + coset_index(r);
/// edge orbit (beta, r) has index beta * rho + coset_index(r).
struct UnfoldedFramework {
  PeriodicFramework framework;
  Sublattice sublattice;
  int base_n = 0;
  int base_m = 0;

  int rho() const { return sublattice.index(); }
};

inline UnfoldedFramework relax(const PeriodicFramework& fw, const Sublattice& S) {
  const int rho = S.index();
  if (rho < 1 || S.b < 0 || S.b >= S.d || S.a < 1) throw ValidationError("sublattice not in canonical form");
  const Mat2 lattice = fw.lattice().matrix() * S.matrix().cast<double>();
  std::vector<Vec2> positions;
  positions.reserve(static_cast<std::size_t>(fw.n() * rho));
  for (int i = 0; i < fw.n(); ++i) {
    for (int k = 0; k < rho; ++k) positions.push_back(fw.copy_position(i, coset_representative(S, k)));
  }
  std::vector<EdgeSpec> edges;
  edges.reserve(static_cast<std::size_t>(fw.m() * rho));
  for (const auto& e : fw.edges()) {
    for (int k = 0; k < rho; ++k) {
      const Shift r = coset_representative(S, k);
      const Shift w = r + e.shift;
      const Shift r2 = reduce(S, w);
      const Shift diff = w - r2;  // lies in the sublattice: diff = M c~
      const int t1 = diff.c1 / S.a;
      const int t2 = (diff.c2 - S.b * t1) / S.d;
      edges.push_back({e.tail * rho + k, e.head * rho + coset_index(S, r2), Shift{t1, t2}});
    }
  }
  return {PeriodicFramework(lattice, std::move(positions), edges), S, fw.n(), fw.m()};
}

/// The same stress value on every coset copy of each edge orbit.
inline Eigen::VectorXd copy_stress(const Eigen::VectorXd& s, const Sublattice& S) {
  const int rho = S.index();
  Eigen::VectorXd out(s.size() * rho);
  for (Eigen::Index b = 0; b < s.size(); ++b) out.segment(b * rho, rho).setConstant(s[b]);
  return out;
}

inline bool stress_persists(const PeriodicFramework& fw, const Eigen::VectorXd& s, const Sublattice& S) {
  const UnfoldedFramework u = relax(fw, S);
  return check_periodic_stress(u.framework, copy_stress(s, S)).periodic;
}

struct UltrarigidityEntry {
  Sublattice sublattice;
  int n = 0;
  int m = 0;
  int sigma = 0;
  int phi = 0;
};

/// Bounded falsifier: checks phi = 0 for every sublattice of index <= max_index. A pass says
/// nothing about larger indices.
struct UltrarigidityReport {
  int max_index = 0;
  std::vector<UltrarigidityEntry> entries;
  bool ultrarigid = false;
  std::optional<Sublattice> first_failure;

  std::string verdict() const {
    if (ultrarigid) return "ultrarigid up to index " + std::to_string(max_index);
    return "flexible at sublattice " + first_failure->label();
  }
};

inline UltrarigidityReport ultrarigidity_probe(const PeriodicFramework& fw, int max_index = 4) {
  if (max_index < 1) throw ValidationError("max_index must be positive");
  UltrarigidityReport rep;
  rep.max_index = max_index;
  for (int k = 1; k <= max_index; ++k) {
    for (const Sublattice& S : sublattices_of_index(k)) {
      const UnfoldedFramework u = relax(fw, S);
      const FlexSpace fs = flex_space(u.framework);
      rep.entries.push_back({S, u.framework.n(), u.framework.m(), fs.report.sigma, fs.report.phi});
      if (fs.report.phi != 0 && !rep.first_failure) rep.first_failure = S;
    }
  }
  rep.ultrarigid = !rep.first_failure.has_value();
  return rep;
}

}  // namespace perimax
