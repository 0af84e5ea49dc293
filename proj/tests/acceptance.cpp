// Acceptance run: one PASS/FAIL line per criterion, nonzero exit status if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "perimax/perimax.hpp"
#include "support.hpp"

using namespace perimax;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Collects failures; the first few are kept for the report line.
struct Tally {
  int checks = 0;
  int failures = 0;
  std::string first;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    if (failures++ == 0) first = what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures == 0) return {true, summary + " (" + std::to_string(checks) + " checks)"};
    return {false, std::to_string(failures) + "/" + std::to_string(checks) + " checks failed; first: " + first};
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

std::vector<std::pair<std::string, PeriodicFramework>> all_fixtures() {
  std::vector<std::pair<std::string, PeriodicFramework>> out;
  for (const auto& name : fixture_names()) out.emplace_back(name, fixture({.name = name}));
  return out;
}

Mat2 kagome_shape() {
  Mat2 m;
  m << 2.0, 1.0, 1.0, 2.0;
  return m;
}

/// d/dtheta of the gauge-fixed kagome placement.
Eigen::VectorXd kagome_gauge_velocity(double theta) {
  const Configuration x = to_configuration(kagome(theta));
  Eigen::VectorXd xdot = Eigen::VectorXd::Zero(10);
  xdot.segment<2>(6) = perp(rotation(theta) * Vec2(1.0, 0.0));
  xdot.segment<2>(8) = perp(rotation(theta) * Vec2(0.5, std::sqrt(3.0) / 2));
  Eigen::VectorXd out(10);
  for (int k = 0; k < 5; ++k) {
    out.segment<2>(2 * k) = rotation(-theta / 2) * (xdot.segment<2>(2 * k) - 0.5 * perp(x.segment<2>(2 * k)));
  }
  return out;
}

/// Pseudo-triangulations with two inserted orbits; each carries a one-dimensional stress.
std::vector<std::pair<std::string, PeriodicFramework>> stressed_frameworks() {
  return {{"ppt3+2", support::stressed_ppt(ppt3())}, {"kagome+2", support::stressed_ppt(kagome(kPi / 2))}};
}

DeformationPath kagome_path() { return continue_path(kagome(kPi / 2), {.steps = 100, .ds = 5e-3}); }
DeformationPath ppt3_path() { return continue_path(ppt3(), {.steps = 100, .ds = 1e-2}); }

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  Tally t;
  auto check = [&](const PeriodicFramework& fw, const std::string& label) {
    const CountReport cr = count_identity_check(fw);
    t.expect(cr.sigma - cr.delta == fw.m() - 2 * fw.n() - 4, label + ": sigma - delta != m - 2n - 4");
    t.expect(cr.flex_identity, label + ": sigma != phi - 1 + (m - 2n)");
    const int rank = oracle::gauss_rank(oracle::rigidity_by_hand(fw));
    t.expect(cr.sigma == fw.m() - rank && cr.delta == 2 * fw.n() + 4 - rank, label + ": rank disagrees with elimination");
  };
  for (const auto& [name, fw] : all_fixtures()) check(fw, name);
  std::mt19937 rng(20240601);
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 6;
    const int m = n == 1 ? 2 + k % 3 : n - 1 + static_cast<int>(rng() % static_cast<unsigned>(16 - n));
    check(oracle::random_framework(rng, n, m), "random #" + std::to_string(k));
  }
  const double secs = seconds_since(t0);
  t.expect(secs < 5.0, "runtime " + fmt(secs) + " s");
  return t.outcome("6 fixtures + 100 random frameworks in " + fmt(secs) + " s");
}

Outcome criterion2() {
  Tally t;
  const PPTCertificate c = certify_ppt(ppt3());
  t.expect(c.n == 3 && c.m == 6 && c.n_star == 3, "ppt3 (n, m, n*) != (3, 6, 3)");
  t.expect(c.sigma == 0 && c.flex_dim == 1, "ppt3 sigma/phi");
  t.expect(c.valid, "ppt3 certificate invalid");
  const auto re = reentrant(kPi / 6, kPi / 6);
  const SpectralReport r = flex_space(re).report;
  t.expect(re.n() == 2 && re.m() == 3 && r.phi == 2, "reentrant (n, m, phi) != (2, 3, 2)");
  return t.outcome("ppt3 (3,6,3) sigma=0 phi=1; reentrant n=2 m=3 phi=2");
}

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  Tally t;
  double worst_trip = 0.0, worst_shift = 0.0;
  int tested = 0;
  auto frameworks = all_fixtures();
  for (auto& p : stressed_frameworks()) frameworks.push_back(p);
  for (const auto& [name, fw] : frameworks) {
    const auto basis = periodic_stress_space(fw);
    if (basis.empty()) continue;
    const FaceComplex fc = trace_faces(fw);
    for (const auto& sv : basis) {
      ++tested;
      const PeriodicLifting a = lifting_from_stress(fw, fc, sv.values, 0.0);
      const PeriodicLifting b = lifting_from_stress(fw, fc, sv.values, 1.75);
      const Eigen::VectorXd back = stress_from_lifting(fw, fc, a).values;
      worst_trip = std::max(worst_trip, (back - sv.values).norm() / sv.values.norm());
      const auto za = vertex_heights(fw, fc, a), zb = vertex_heights(fw, fc, b);
      for (std::size_t v = 0; v < za.size(); ++v) worst_shift = std::max(worst_shift, std::abs(zb[v] - za[v] - 1.75));
      for (std::size_t f = 0; f < a.normal.size(); ++f) {
        worst_shift = std::max(worst_shift, (a.normal[f] - b.normal[f]).norm());
        worst_shift = std::max(worst_shift, std::abs(b.offset[f] - a.offset[f] - 1.75));
      }
    }
  }
  const double secs = seconds_since(t0);
  t.expect(tested > 0, "no fixture carries a stress");
  t.expect(worst_trip < 1e-9, "round trip error " + fmt(worst_trip));
  t.expect(worst_shift < 1e-12, "lifting difference not constant: " + fmt(worst_shift));
  t.expect(secs < 1.0, "runtime " + fmt(secs) + " s");
  return t.outcome(std::to_string(tested) + " stresses, round trip " + fmt(worst_trip) + ", offset deviation " + fmt(worst_shift) + ", " + fmt(secs) + " s");
}

Outcome criterion4() {
  Tally t;
  const auto sq = square_grid();
  const FaceComplex fc = trace_faces(sq);
  for (const Eigen::Vector2d& s : {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(1.0, 1.0)}) {
    const std::string label = "s = (" + fmt(s[0]) + ", " + fmt(s[1]) + ")";
    t.expect(check_periodic_stress(sq, s).equilibrium, label + " is not an equilibrium stress");
    t.expect(!check_periodic_stress(sq, s).periodic, label + " wrongly accepted as periodic");
    try {
      lifting_from_stress(sq, fc, s);
      t.expect(false, label + " lifted");
    } catch (const NotPeriodicStress& e) {
      t.expect(e.residual() > 0.0, label + " rejected with zero residual");
    }
  }
  // Equal stresses on the honeycomb balance at every vertex but are not periodic.
  const auto hc = honeycomb();
  const Eigen::Vector3d ones = Eigen::Vector3d::Ones();
  t.expect(check_periodic_stress(hc, ones).equilibrium, "honeycomb s=(1,1,1) is not an equilibrium stress");
  try {
    lifting_from_stress(hc, trace_faces(hc), ones);
    t.expect(false, "honeycomb s=(1,1,1) lifted");
  } catch (const NotPeriodicStress& e) {
    t.expect(e.residual() > 0.0, "honeycomb rejected with zero residual");
  }
  return t.outcome("square grid s=(1,0), s=(1,1) and honeycomb s=(1,1,1) rejected with nonzero residual");
}

Outcome criterion5() {
  Tally t;
  auto frameworks = all_fixtures();
  for (auto& p : stressed_frameworks()) frameworks.push_back(p);
  int tested = 0;
  for (const auto& [name, fw] : frameworks) {
    const auto basis = periodic_stress_space(fw);
    if (basis.size() != 1) continue;
    ++tested;
    bool mountain = false, valley = false;
    for (const auto& f : classify_folds(fw, basis[0].values)) {
      mountain = mountain || f.fold == FoldClass::mountain;
      valley = valley || f.fold == FoldClass::valley;
    }
    t.expect(mountain && valley, name + " lacks a mountain or a valley");
  }
  t.expect(tested >= 2, "fewer than two one-dimensional stress spaces");
  return t.outcome(std::to_string(tested) + " one-dimensional stress spaces");
}

Outcome criterion6() {
  Tally t;
  int sublattices = 0;
  for (int k = 1; k <= 4; ++k) sublattices += static_cast<int>(sublattices_of_index(k).size());
  t.expect(sublattices == 15, "sublattice count " + std::to_string(sublattices));
  auto frameworks = all_fixtures();
  for (auto& p : stressed_frameworks()) frameworks.push_back(p);
  for (const auto& [name, fw] : frameworks) {
    const auto basis = periodic_stress_space(fw);
    const int sigma = static_cast<int>(basis.size());
    for (int k = 1; k <= 4; ++k) {
      for (const Sublattice& S : sublattices_of_index(k)) {
        const std::string label = name + " at " + S.label();
        const UnfoldedFramework u = relax(fw, S);
        t.expect(flex_space(u.framework).report.sigma >= sigma, label + ": sigma decreased");
        for (const auto& sv : basis) t.expect(stress_persists(fw, sv.values, S), label + ": copied stress not periodic");
      }
    }
  }
  return t.outcome(std::to_string(sublattices) + " sublattices of index <= 4 on " + std::to_string(frameworks.size()) +
                   " frameworks");
}

Outcome criterion7() {
  Tally t;
  for (const auto& [name, fw] : {std::pair{std::string("ppt3"), ppt3()}, std::pair{std::string("kagome"), kagome(kPi / 2)}}) {
    for (int k = 1; k <= 4; ++k) {
      for (const Sublattice& S : sublattices_of_index(k)) {
        const PPTCertificate c = certify_ppt(relax(fw, S).framework);
        t.expect(c.valid && c.flex_dim == 1, name + " at " + S.label() + ": " + (c.failures.empty() ? "phi" : c.failures.front()));
      }
    }
  }
  return t.outcome("ppt3 and kagome(pi/2) under all 15 relaxations");
}

Outcome criterion8() {
  Tally t;
  int expansive = 0;
  for (const auto& [name, path] : {std::pair{std::string("kagome"), kagome_path()}, std::pair{std::string("ppt3"), ppt3_path()}}) {
    for (const auto& s : path.samples) {
      if (!s.expansive || !*s.expansive) continue;
      ++expansive;
      t.expect(s.auxetic && *s.auxetic, name + " sample tau=" + fmt(s.tau) + " expansive but not auxetic");
    }
  }
  t.expect(expansive > 100, "only " + std::to_string(expansive) + " expansive samples");
  return t.outcome(std::to_string(expansive) + " expansive samples, all auxetic");
}

Outcome criterion9() {
  Tally t;
  double gram_err = 0.0, dgram_err = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double theta = 0.1 + 1.9 * k / 49.0;
    const auto g = apply_gauge(kagome(theta));
    gram_err = std::max(gram_err, (gram(g.lattice().matrix()) - (1 + std::cos(theta)) * kagome_shape()).cwiseAbs().maxCoeff());
    const Eigen::VectorXd tan = gauge_kernel(g, to_configuration(g));
    const Eigen::VectorXd v = kagome_gauge_velocity(theta);
    const Mat2 dw = gram_derivative(to_configuration(g), tan) * (tan.dot(v) > 0 ? 1.0 : -1.0) * v.norm();
    dgram_err = std::max(dgram_err, (dw + std::sin(theta) * kagome_shape()).cwiseAbs().maxCoeff());
  }
  t.expect(gram_err < 1e-12, "Gram error " + fmt(gram_err));
  t.expect(dgram_err < 1e-8, "Gram derivative error " + fmt(dgram_err));
  const DeformationPath p = continue_path(kagome(kPi / 2), {.steps = 1000, .ds = 1e-2});
  const double theta_end = std::acos(p.samples.back().gram(0, 0) / 2.0 - 1.0);
  t.expect(p.termination == "pointedness lost", "kagome path ended by '" + p.termination + "'");
  t.expect(std::abs(theta_end - kPi / 3) < 1e-6, "boundary at theta=" + fmt(theta_end));
  return t.outcome("Gram " + fmt(gram_err) + ", dGram " + fmt(dgram_err) + ", boundary offset " +
                   fmt(std::abs(theta_end - kPi / 3)));
}

Outcome criterion10() {
  const auto t0 = std::chrono::steady_clock::now();
  Tally t;
  const UltrarigidityReport rep = ultrarigidity_probe(ultrarigid(), 4);
  const double secs = seconds_since(t0);
  t.expect(rep.ultrarigid, rep.verdict());
  // sigma_1(1) + sigma_1(2) + sigma_1(3) + sigma_1(4) = 1 + 3 + 4 + 7
  t.expect(rep.entries.size() == 15, std::to_string(rep.entries.size()) + " sublattices probed");
  for (const auto& e : rep.entries) t.expect(e.phi == 0, e.sublattice.label() + " flexible");
  t.expect(secs < 30.0, "runtime " + fmt(secs) + " s");
  return t.outcome(std::to_string(rep.entries.size()) + " sublattices, phi=0 on all, " + fmt(secs) + " s");
}

Outcome criterion11() {
  Tally t;
  for (const auto& [name, base] : {std::pair{std::string("ppt3"), ppt3()}, std::pair{std::string("kagome"), kagome(kPi / 2)}}) {
    const auto cands = enumerate_candidates(base, normalized_flex(base), kDefaultCutoff);
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
    int tested = 0;
    for (int guard = 0; tested < 20 && guard < 10000; ++guard) {
      const auto& a = cands[pick(rng)];
      const auto& b = cands[pick(rng)];
      if (same_orbit(a.spec(), b.spec())) continue;
      const auto one = insert_edge_orbit(base, a);
      if (!insertable(one, b.spec())) continue;
      const auto two = insert_edge_orbit(one, b);
      const auto basis = periodic_stress_space(two);
      ++tested;
      const std::string label = name + " pair #" + std::to_string(tested);
      if (basis.size() != 1) {
        t.expect(false, label + ": stress space of dimension " + std::to_string(basis.size()));
        continue;
      }
      t.expect(basis[0].values[base.m()] * basis[0].values[base.m() + 1] < 0.0, label + ": stresses share a sign");
      t.expect(a.rate * b.rate >= 0.0, label + ": length derivatives differ in sign");
    }
    t.expect(tested == 20, name + ": only " + std::to_string(tested) + " insertable pairs");
  }
  return t.outcome("20 double insertions on each of ppt3 and kagome(pi/2)");
}

Outcome criterion12() {
  Tally t;
  double fd_err = 0.0, drift = 0.0;
  const auto run = [&](const PeriodicFramework& fw, const DeformationPath& p) {
    const auto g = apply_gauge(fw);
    for (const auto& s : p.samples) {
      const Mat2 fd = gram_finite_difference(g, s.config, s.tangent, 1e-5);
      fd_err = std::max(fd_err, (fd - s.dgram).norm() / s.dgram.norm());
      drift = std::max(drift, s.length_drift);
    }
  };
  run(kagome(kPi / 2), kagome_path());
  run(ppt3(), continue_path(ppt3(), {.steps = 100, .ds = 1e-2, .stop_at_event = false}));
  t.expect(fd_err < 1e-6, "finite-difference mismatch " + fmt(fd_err));
  t.expect(drift < 1e-10, "length drift " + fmt(drift));
  return t.outcome("finite differences " + fmt(fd_err) + ", drift " + fmt(drift));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"count identities", criterion1},
      {"fixture counts", criterion2},
      {"lifting round trip", criterion3},
      {"non-periodic stress rejected", criterion4},
      {"mountain and valley folds", criterion5},
      {"stress persistence under relaxation", criterion6},
      {"pseudo-triangulation survives relaxation", criterion7},
      {"expansive implies auxetic", criterion8},
      {"kagome analytics", criterion9},
      {"ultrarigidity", criterion10},
      {"opposite-sign insertions", criterion11},
      {"numerical hygiene", criterion12},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2zu %-42s %s  %s\n", k + 1, criteria[k].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
