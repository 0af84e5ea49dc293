#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "oracles.hpp"
#include "perimax/fixtures.hpp"
#include "perimax/pseudo_tri.hpp"
#include "perimax/relax.hpp"
#include "support.hpp"

using namespace perimax;

namespace {

std::vector<Sublattice> up_to(int k) {
  std::vector<Sublattice> out;
  for (int i = 1; i <= k; ++i) {
    for (const auto& s : sublattices_of_index(i)) out.push_back(s);
  }
  return out;
}

std::vector<double> sorted_lengths(const PeriodicFramework& fw) {
  std::vector<double> out;
  for (int b = 0; b < fw.m(); ++b) out.push_back(fw.edge_vector(b).norm());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Sublattices, CountsMatchDivisorSums) {
  for (int k = 1; k <= 12; ++k) EXPECT_EQ(static_cast<int>(sublattices_of_index(k).size()), oracle::sigma1(k)) << k;
  for (int k = 1; k <= 6; ++k) EXPECT_EQ(oracle::brute_sublattice_count(k), oracle::sigma1(k)) << k;
  EXPECT_EQ(up_to(4).size(), 15u);
}

TEST(Sublattices, IndexTwo) {
  const auto s = sublattices_of_index(2);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], (Sublattice{1, 0, 2}));
  EXPECT_EQ(s[1], (Sublattice{1, 1, 2}));
  EXPECT_EQ(s[2], (Sublattice{2, 0, 1}));
  EXPECT_EQ(sublattices_of_index(1), std::vector<Sublattice>{Sublattice{}});
}

TEST(Sublattices, CanonicalFormOfAnyBasis) {
  for (int k = 1; k <= 6; ++k) {
    for (const auto& s : sublattices_of_index(k)) {
      EXPECT_EQ(Sublattice::from_matrix(s.matrix()), s);
      Eigen::Matrix2i U;  // unimodular change of basis
      U << 2, 1, 1, 1;
      EXPECT_EQ(Sublattice::from_matrix(s.matrix() * U), s);
      U << 0, 1, 1, 0;
      EXPECT_EQ(Sublattice::from_matrix(s.matrix() * U), s);
    }
  }
  EXPECT_THROW(Sublattice::from_matrix(Eigen::Matrix2i::Zero()), ValidationError);
}

TEST(Relax, IdentityIsRelabeling) {
  const auto fw = ppt3();
  const auto u = relax(fw, Sublattice{});
  EXPECT_EQ(u.framework.n(), fw.n());
  EXPECT_EQ(u.framework.m(), fw.m());
  EXPECT_EQ(u.framework.lattice().matrix(), fw.lattice().matrix());
  for (int b = 0; b < fw.m(); ++b) EXPECT_LT((u.framework.edge_vector(b) - fw.edge_vector(b)).norm(), 1e-15);
}

TEST(Relax, SquareGridDoubleCell) {
  const auto u = relax(square_grid(), Sublattice{2, 0, 1});
  EXPECT_EQ(u.framework.n(), 2);
  EXPECT_EQ(u.framework.m(), 4);
  const int rank = oracle::gauss_rank(rigidity_matrix(u.framework));
  const int phi = 2 * u.framework.n() + 4 - rank - 3;
  EXPECT_EQ(flex_space(u.framework).report.phi, phi);
  EXPECT_EQ(phi, 2);
}

TEST(Relax, UnfoldedEdgesSatisfyCosetEquation) {
  for (const auto& S : up_to(6)) {
    const auto fw = kagome(1.1);
    const auto u = relax(fw, S);
    const int rho = S.index();
    ASSERT_EQ(u.framework.n(), fw.n() * rho);
    ASSERT_EQ(u.framework.m(), fw.m() * rho);
    const Eigen::Matrix2i M = S.matrix();
    for (const auto& e : u.framework.edges()) {
      const auto& orig = fw.edges()[e.id / rho];
      // Canonicalization may have reversed the stored orientation; one of the two must fit.
      auto fits = [&](int tail, int head, const Shift& ct, double sign) {
        if (tail != orig.tail * rho + e.id % rho || head / rho != orig.head) return false;
        const Shift r = coset_representative(S, tail % rho);
        const Shift r2 = coset_representative(S, head % rho);
        const Eigen::Vector2i lhs(r.c1 + orig.shift.c1, r.c2 + orig.shift.c2);
        const Eigen::Vector2i rhs = Eigen::Vector2i(r2.c1, r2.c2) + M * Eigen::Vector2i(ct.c1, ct.c2);
        return lhs == rhs && (u.framework.edge_vector(e.id) - sign * fw.edge_vector(orig.id)).norm() < 1e-12;
      };
      EXPECT_TRUE(fits(e.tail, e.head, e.shift, 1.0) || fits(e.head, e.tail, -e.shift, -1.0)) << S.label() << " " << e.id;
    }
  }
}

TEST(Relax, SamePointSet) {
  // Every unfolded vertex orbit sits on a copy of an original vertex orbit, and the unfolded
  // lattice is the original one times M.
  const auto fw = ppt3();
  for (const auto& S : up_to(4)) {
    const auto u = relax(fw, S);
    EXPECT_LT((u.framework.lattice().matrix() - fw.lattice().matrix() * S.matrix().cast<double>()).norm(), 1e-14);
    for (int v = 0; v < u.framework.n(); ++v) {
      const Vec2 c = fw.lattice().coordinates(u.framework.position(v) - fw.position(v / S.index()));
      EXPECT_NEAR(c.x(), std::round(c.x()), 1e-12);
      EXPECT_NEAR(c.y(), std::round(c.y()), 1e-12);
    }
  }
}

TEST(Relax, CountIdentityAndMonotoneStresses) {
  for (const auto& fw : {square_grid(), kagome(1.3), ppt3(), cubes(), reentrant(0.5, 0.5), ultrarigid()}) {
    const int sigma = flex_space(fw).report.sigma;
    for (const auto& S : up_to(4)) {
      const auto u = relax(fw, S);
      const CountReport c = count_identity_check(u.framework);
      EXPECT_TRUE(c.stress_flex_identity);
      EXPECT_EQ(c.n, fw.n() * S.index());
      EXPECT_GE(c.sigma, sigma);
    }
  }
}

TEST(Relax, Composition) {
  const auto fw = ppt3();
  const std::vector<Sublattice> ss = {{1, 0, 2}, {1, 1, 2}, {2, 0, 1}, {1, 2, 3}};
  for (const auto& s1 : ss) {
    for (const auto& s2 : ss) {
      const auto twice = relax(relax(fw, s1).framework, s2).framework;
      const auto once = relax(fw, compose(s1, s2)).framework;
      EXPECT_EQ(twice.n(), once.n());
      EXPECT_EQ(twice.m(), once.m());
      const auto a = flex_space(twice).report, b = flex_space(once).report;
      EXPECT_EQ(a.sigma, b.sigma);
      EXPECT_EQ(a.delta, b.delta);
      const auto la = sorted_lengths(twice), lb = sorted_lengths(once);
      for (std::size_t k = 0; k < la.size(); ++k) EXPECT_NEAR(la[k], lb[k], 1e-12);
      EXPECT_NEAR(std::abs(twice.lattice().matrix().determinant()), std::abs(once.lattice().matrix().determinant()), 1e-12);
    }
  }
}

TEST(Persistence, Examples) {
  EXPECT_TRUE(stress_persists(ppt3(), Eigen::VectorXd::Zero(6), {1, 1, 2}));
  const Eigen::VectorXd s = periodic_stress_space(cubes()).front().values;
  for (const auto& S : sublattices_of_index(2)) EXPECT_TRUE(stress_persists(cubes(), s, S));
  Eigen::VectorXd sq(2);
  sq << 1.0, 0.0;
  for (const auto& S : sublattices_of_index(2)) EXPECT_FALSE(stress_persists(square_grid(), sq, S));
}

TEST(Persistence, AllStressedFixturesUpToIndexFour) {
  for (const auto& fw : {cubes(), support::stressed_ppt(ppt3())}) {
    for (const auto& st : periodic_stress_space(fw)) {
      for (const auto& S : up_to(4)) EXPECT_TRUE(stress_persists(fw, st.values, S)) << S.label();
    }
  }
}

TEST(Relax, PseudoTriangulationSurvives) {
  const auto u = relax(ppt3(), Sublattice{2, 0, 2});
  EXPECT_EQ(u.framework.n(), 12);
  EXPECT_EQ(u.framework.m(), 24);
  const PPTCertificate c = certify_ppt(u.framework);
  EXPECT_TRUE(c.valid);
  EXPECT_EQ(c.flex_dim, 1);
}

TEST(Ultrarigidity, Probe) {
  const auto sq = ultrarigidity_probe(square_grid(), 2);
  EXPECT_FALSE(sq.ultrarigid);
  ASSERT_TRUE(sq.first_failure.has_value());
  EXPECT_EQ(*sq.first_failure, Sublattice{});
  const auto ur = ultrarigidity_probe(ultrarigid(), 4);
  EXPECT_TRUE(ur.ultrarigid);
  EXPECT_EQ(ur.entries.size(), 15u);
  EXPECT_EQ(ur.verdict(), "ultrarigid up to index 4");
  EXPECT_THROW(ultrarigidity_probe(ultrarigid(), 0), ValidationError);
}
