// Command-line front end. Every subcommand prints one JSON document on stdout; exit status is
// 0 on success, 2 on invalid input, 3 when a numerical procedure cannot be trusted.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "perimax/perimax.hpp"

using nlohmann::json;
using namespace perimax;

namespace {

bool g_quiet = false;

void log(const std::string& msg) {
  if (!g_quiet) std::cerr << msg << '\n';
}

PeriodicFramework load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_framework(ss.str());
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
  log("wrote " + path);
}

/// "RxC" -> tiles [0, R) x [0, C).
TileRange parse_tiles(const std::string& spec) {
  const auto x = spec.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(spec);
    std::size_t used = 0;
    const int r = std::stoi(spec.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(spec);
    const std::string tail = spec.substr(x + 1);
    const int c = std::stoi(tail, &used);
    if (used != tail.size()) throw std::invalid_argument(spec);
    if (r < 1 || c < 1) throw std::invalid_argument(spec);
    return {0, r, 0, c};
  } catch (const std::logic_error&) {
    throw ValidationError("tiles must look like RxC with positive integers, got '" + spec + "'");
  }
}

/// Four integers p,q,r,s naming the generators p lambda_1 + q lambda_2 and r lambda_1 + s lambda_2.
Sublattice parse_matrix(const std::string& spec) {
  std::vector<int> v;
  std::stringstream ss(spec);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      v.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    }
  } catch (const std::logic_error&) {
    v.clear();
  }
  if (v.size() != 4) throw ValidationError("matrix must be four comma-separated integers, got '" + spec + "'");
  Eigen::Matrix2i M;
  M << v[0], v[2], v[1], v[3];
  return Sublattice::from_matrix(M);
}

json to_json(const Mat2& m) { return json::array({json::array({m(0, 0), m(0, 1)}), json::array({m(1, 0), m(1, 1)})}); }

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

json to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

json to_json(const Shift& c) { return json::array({c.c1, c.c2}); }

json to_json(const Sublattice& S) {
  return {{"label", S.label()}, {"a", S.a}, {"b", S.b}, {"d", S.d}, {"index", S.index()}};
}

void emit(const json& doc) { std::cout << doc.dump(2) << '\n'; }

json analyze(const PeriodicFramework& fw) {
  const CountReport cr = count_identity_check(fw);
  json doc{{"n", cr.n},
           {"m", cr.m},
           {"sigma", cr.sigma},
           {"delta", cr.delta},
           {"phi", cr.phi},
           {"identities", {{"sigma_minus_delta", cr.stress_flex_identity}, {"sigma_from_phi", cr.flex_identity}}},
           {"rank_gap_ratio", cr.gap_ratio}};
  const NonCrossingReport nc = check_noncrossing(fw);
  doc["noncrossing"] = nc.ok;
  if (nc.ok) {
    const FaceComplex fc = trace_faces(fw);
    const CornerReport corners = corner_count(fc, fw.n());
    doc["n_star"] = fc.face_count();
    doc["identities"]["euler"] = fw.n() - fw.m() + fc.face_count() == 0;
    doc["identities"]["degree_sum"] = corners.degree_sum_matches;
  } else {
    doc["n_star"] = nullptr;
  }
  return doc;
}

json ppt_report(const PeriodicFramework& fw) {
  const PPTCertificate c = certify_ppt(fw);
  json pointed = json::array(), pt = json::array(), corners = json::array();
  for (bool b : c.pointed) pointed.push_back(b);
  for (bool b : c.pseudo_triangular) pt.push_back(b);
  for (int k : c.corners) corners.push_back(k);
  return {{"valid", c.valid},       {"n", c.n},         {"m", c.m},
          {"n_star", c.n_star},     {"sigma", c.sigma}, {"phi", c.flex_dim},
          {"pointed", pointed},     {"pseudo_triangular", pt},
          {"corners", corners},     {"failures", c.failures}};
}

json stress_report(const PeriodicFramework& fw) {
  json list = json::array();
  for (const auto& sv : periodic_stress_space(fw)) {
    json folds = json::array();
    for (const auto& f : classify_folds(fw, sv.values)) folds.push_back(to_string(f.fold));
    list.push_back({{"values", to_json(sv.values)}, {"periodic", sv.is_periodic}, {"folds", folds}});
  }
  json inv = json::array();
  for (const auto& sv : invariant_equilibrium_stress_space(fw)) {
    inv.push_back({{"values", to_json(sv.values)}, {"periodic", sv.is_periodic}});
  }
  return {{"sigma", list.size()}, {"periodic_stresses", list}, {"invariant_equilibrium_stresses", inv}};
}

json path_report(const DeformationPath& p, bool want_expansive, bool want_auxetic) {
  json samples = json::array();
  for (const auto& s : p.samples) {
    json j{{"tau", s.tau},
           {"lattice", to_json(lattice_of(s.config))},
           {"gram", to_json(s.gram)},
           {"dgram", to_json(s.dgram)},
           {"length_drift", s.length_drift}};
    if (want_expansive && s.expansive) {
      j["expansive"] = *s.expansive;
      j["min_pair_rate"] = *s.min_rate;
    }
    if (want_auxetic && s.auxetic) j["auxetic"] = *s.auxetic;
    if (!s.event.empty()) j["event"] = s.event;
    samples.push_back(std::move(j));
  }
  return {{"termination", p.termination},
          {"pair_cutoff", p.cutoff},
          {"note", "expansiveness is checked only on vertex pairs within the pair cutoff"},
          {"samples", samples}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic frameworks: rigidity, liftings, pseudo-triangulations and auxetic deformations"};
  app.require_subcommand(1);
  app.add_flag("--quiet", g_quiet, "Suppress log messages on stderr");

  std::string file, out, tiles = "3x3", matrix, checks = "expansive,auxetic", name;
  int stress_index = 0, cutoff = kDefaultCutoff, max_index = 4, steps = 100;
  double c0 = 0.0, ds = 1e-2;
  bool past_events = false;
  FixtureSpec spec;

  auto* analyze_cmd = app.add_subcommand("analyze", "Counts, rank report and identity checks");
  analyze_cmd->add_option("FILE", file)->required();

  auto* ppt_cmd = app.add_subcommand("ppt", "Pointed pseudo-triangulation certificate");
  ppt_cmd->add_option("FILE", file)->required();

  auto* stress_cmd = app.add_subcommand("stress", "Periodic stress basis with fold classes");
  stress_cmd->add_option("FILE", file)->required();

  auto* lift_cmd = app.add_subcommand("lift", "Periodic lifting of a periodic stress, exported as OBJ");
  lift_cmd->add_option("FILE", file)->required();
  lift_cmd->add_option("--stress-index", stress_index, "Index into the periodic stress basis");
  lift_cmd->add_option("--c0", c0, "Height offset of the base face");
  lift_cmd->add_option("--tiles", tiles, "Patch size RxC");
  lift_cmd->add_option("--out", out, "OBJ output file")->required();

  auto* svg_cmd = app.add_subcommand("svg", "SVG drawing of a patch with faces colored by orbit");
  svg_cmd->add_option("FILE", file)->required();
  svg_cmd->add_option("--tiles", tiles, "Patch size RxC");
  svg_cmd->add_option("--out", out, "SVG output file")->required();

  auto* relax_cmd = app.add_subcommand("relax", "Framework with relaxed periodicity");
  relax_cmd->add_option("FILE", file)->required();
  relax_cmd->add_option("--matrix", matrix, "Sublattice as a,b,0,d (generators a l1 + b l2 and d l2)")->required();
  relax_cmd->add_option("--out", out, "Output framework file (stdout when omitted)");

  auto* ultra_cmd = app.add_subcommand("ultra", "Bounded ultrarigidity probe");
  ultra_cmd->add_option("FILE", file)->required();
  ultra_cmd->add_option("--max-index", max_index, "Largest sublattice index examined");

  auto* rigidify_cmd = app.add_subcommand("rigidify", "Insert the top rigidifying edge orbit");
  rigidify_cmd->add_option("FILE", file)->required();
  rigidify_cmd->add_option("--cutoff", cutoff, "Largest |c| in the candidate search");
  rigidify_cmd->add_option("--out", out, "Output framework file");

  auto* deform_cmd = app.add_subcommand("deform", "Continue the one-parameter deformation");
  deform_cmd->add_option("FILE", file)->required();
  deform_cmd->add_option("--steps", steps, "Number of continuation steps");
  deform_cmd->add_option("--ds", ds, "Arclength step");
  deform_cmd->add_option("--cutoff", cutoff, "Largest |c| in the expansive pair check");
  deform_cmd->add_option("--check", checks, "Verdicts to report: expansive,auxetic");
  deform_cmd->add_flag("--past-events", past_events, "Keep going after a pseudo-triangulation boundary event");
  deform_cmd->add_option("--out", out, "Path JSON file (stdout when omitted)");

  auto* fixture_cmd = app.add_subcommand("fixture", "Write a built-in example framework");
  fixture_cmd->add_option("NAME", name)->required()->check(CLI::IsMember(fixture_names()));
  fixture_cmd->add_option("--theta", spec.theta, "kagome rotation angle");
  fixture_cmd->add_option("--alpha", spec.alpha, "reentrant right angle");
  fixture_cmd->add_option("--beta", spec.beta, "reentrant left angle");
  fixture_cmd->add_option("--out", out, "Output framework file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (analyze_cmd->parsed()) {
      emit(analyze(load(file)));
    } else if (ppt_cmd->parsed()) {
      emit(ppt_report(load(file)));
    } else if (stress_cmd->parsed()) {
      emit(stress_report(load(file)));
    } else if (lift_cmd->parsed()) {
      const PeriodicFramework fw = load(file);
      const FaceComplex fc = trace_faces(fw);
      const auto basis = periodic_stress_space(fw);
      if (stress_index < 0 || stress_index >= static_cast<int>(basis.size())) {
        throw ValidationError("stress index " + std::to_string(stress_index) + " out of range; sigma = " +
                              std::to_string(basis.size()));
      }
      const Eigen::VectorXd& s = basis[static_cast<std::size_t>(stress_index)].values;
      const PeriodicLifting L = lifting_from_stress(fw, fc, s, c0);
      write_file(out, export_terrain(fw, fc, L, parse_tiles(tiles)));
      json normals = json::array(), offsets = json::array();
      for (const auto& v : L.normal) normals.push_back(to_json(v));
      for (double c : L.offset) offsets.push_back(c);
      emit({{"stress", to_json(s)},
            {"normals", normals},
            {"offsets", offsets},
            {"base_face", L.base_face},
            {"c0", L.c0},
            {"compatibility_residual", compatibility_residual(fw, fc, L)}});
    } else if (svg_cmd->parsed()) {
      const PeriodicFramework fw = load(file);
      write_file(out, export_svg(fw, trace_faces(fw), parse_tiles(tiles)));
      emit({{"svg", out}});
    } else if (relax_cmd->parsed()) {
      const UnfoldedFramework u = relax(load(file), parse_matrix(matrix));
      if (out.empty()) {
        emit(framework_to_json(u.framework));
      } else {
        write_file(out, serialize_framework(u.framework));
        emit({{"sublattice", to_json(u.sublattice)}, {"n", u.framework.n()}, {"m", u.framework.m()}});
      }
    } else if (ultra_cmd->parsed()) {
      const UltrarigidityReport rep = ultrarigidity_probe(load(file), max_index);
      json table = json::array();
      for (const auto& e : rep.entries) {
        table.push_back(
            {{"sublattice", to_json(e.sublattice)}, {"n", e.n}, {"m", e.m}, {"sigma", e.sigma}, {"phi", e.phi}});
      }
      emit({{"ultrarigid", rep.ultrarigid}, {"max_index", rep.max_index}, {"verdict", rep.verdict()}, {"table", table}});
    } else if (rigidify_cmd->parsed()) {
      const PeriodicFramework fw = load(file);
      const auto cands = find_rigidifying_edges(fw, cutoff);
      const PeriodicFramework rigid = insert_edge_orbit(fw, cands.front());
      if (!out.empty()) write_file(out, serialize_framework(rigid));
      json list = json::array();
      for (const auto& c : cands) list.push_back({{"tail", c.tail}, {"head", c.head}, {"shift", to_json(c.shift)}, {"rate", c.rate}});
      emit({{"inserted", list.front()}, {"candidates", list}, {"phi_after", flex_space(rigid).report.phi}});
    } else if (deform_cmd->parsed()) {
      bool want_expansive = false, want_auxetic = false;
      std::stringstream ss(checks);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item == "expansive") {
          want_expansive = true;
        } else if (item == "auxetic") {
          want_auxetic = true;
        } else if (!item.empty()) {
          throw ValidationError("unknown check '" + item + "'");
        }
      }
      ContinuationOptions opt;
      opt.steps = steps;
      opt.ds = ds;
      opt.cutoff = cutoff;
      opt.stop_at_event = !past_events;
      const json doc = path_report(continue_path(load(file), opt), want_expansive, want_auxetic);
      if (out.empty()) {
        emit(doc);
      } else {
        write_file(out, doc.dump(2) + "\n");
        emit({{"termination", doc["termination"]}, {"samples", doc["samples"].size()}});
      }
    } else if (fixture_cmd->parsed()) {
      spec.name = name;
      const PeriodicFramework fw = fixture(spec);
      if (out.empty()) {
        emit(framework_to_json(fw));
      } else {
        write_file(out, serialize_framework(fw));
        emit({{"fixture", name}, {"n", fw.n()}, {"m", fw.m()}});
      }
    }
  } catch (const NumericalError& e) {
    emit({{"error", {{"kind", "numerical"}, {"message", e.what()}}}});
    log(std::string("numerical failure: ") + e.what());
    return 3;
  } catch (const ValidationError& e) {
    emit({{"error", {{"kind", "validation"}, {"message", e.what()}}}});
    log(std::string("invalid input: ") + e.what());
    return 2;
  }
  return 0;
}
