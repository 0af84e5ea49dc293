#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

#include "json.hpp"

#include "perimax/framework.hpp"

namespace perimax {

/// Shortest decimal string that parses back to exactly `x`.
inline std::string format_decimal(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace detail {

inline double parse_real(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ValidationError("schema violation: " + where + " must be a decimal string");
  const std::string s = j.get<std::string>();
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ValidationError("schema violation: " + where + " is not a decimal number: '" + s + "'");
  }
  return value;
}

inline int parse_int(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ValidationError("schema violation: " + where + " must be an integer");
  return j.get<int>();
}

inline const nlohmann::json& member(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError("schema violation: " + where + " lacks key '" + key + "'");
  }
  return obj.at(key);
}

inline Vec2 parse_pair(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("schema violation: " + where + " must have two entries");
  return {parse_real(j[0], where + "[0]"), parse_real(j[1], where + "[1]")};
}

}  // namespace detail

inline PeriodicFramework framework_from_json(const nlohmann::json& doc) {
  using detail::member;
  if (!doc.is_object()) throw ValidationError("schema violation: document must be an object");
  if (detail::parse_int(member(doc, "dimension", "document"), "dimension") != 2) {
    throw ValidationError("schema violation: only dimension 2 is supported");
  }
  const auto& lat = member(doc, "lattice", "document");
  if (!lat.is_array() || lat.size() != 2) throw ValidationError("schema violation: lattice must list two columns");
  Mat2 lattice;
  lattice.col(0) = detail::parse_pair(lat[0], "lattice[0]");
  lattice.col(1) = detail::parse_pair(lat[1], "lattice[1]");

  const auto& verts = member(doc, "vertices", "document");
  if (!verts.is_array()) throw ValidationError("schema violation: vertices must be an array");
  std::vector<Vec2> positions(verts.size(), Vec2::Zero());
  std::vector<bool> seen(verts.size(), false);
  for (std::size_t k = 0; k < verts.size(); ++k) {
    const std::string where = "vertices[" + std::to_string(k) + "]";
    const int id = detail::parse_int(member(verts[k], "id", where), where + ".id");
    if (id < 0 || static_cast<std::size_t>(id) >= verts.size() || seen[static_cast<std::size_t>(id)]) {
      throw ValidationError("schema violation: vertex ids must be consecutive and unique", id);
    }
    seen[static_cast<std::size_t>(id)] = true;
    positions[static_cast<std::size_t>(id)] = detail::parse_pair(member(verts[k], "pos", where), where + ".pos");
  }

  const auto& edges = member(doc, "edges", "document");
  if (!edges.is_array()) throw ValidationError("schema violation: edges must be an array");
  std::vector<EdgeSpec> specs;
  specs.reserve(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string where = "edges[" + std::to_string(k) + "]";
    const auto& e = edges[k];
    const auto& shift = member(e, "shift", where);
    if (!shift.is_array() || shift.size() != 2) {
      throw ValidationError("schema violation: " + where + ".shift must have two integers", static_cast<int>(k));
    }
    specs.push_back({detail::parse_int(member(e, "tail", where), where + ".tail"),
                     detail::parse_int(member(e, "head", where), where + ".head"),
                     Shift{detail::parse_int(shift[0], where + ".shift[0]"),
                           detail::parse_int(shift[1], where + ".shift[1]")}});
  }
  return PeriodicFramework(lattice, std::move(positions), specs);
}

/// Parses and validates a framework document.
inline PeriodicFramework parse_framework(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("schema violation: malformed JSON: ") + e.what());
  }
  return framework_from_json(doc);
}

inline nlohmann::json framework_to_json(const PeriodicFramework& fw) {
  using nlohmann::json;
  const Mat2& L = fw.lattice().matrix();
  json doc;
  doc["dimension"] = 2;
  doc["lattice"] = json::array({json::array({format_decimal(L(0, 0)), format_decimal(L(1, 0))}),
                                json::array({format_decimal(L(0, 1)), format_decimal(L(1, 1))})});
  json verts = json::array();
  for (const auto& v : fw.vertices()) {
    verts.push_back({{"id", v.id},
                     {"pos", json::array({format_decimal(v.position.x()), format_decimal(v.position.y())})}});
  }
  doc["vertices"] = std::move(verts);
  json edges = json::array();
  for (const auto& e : fw.edges()) {
    edges.push_back({{"tail", e.tail}, {"head", e.head}, {"shift", json::array({e.shift.c1, e.shift.c2})}});
  }
  doc["edges"] = std::move(edges);
  return doc;
}

inline std::string serialize_framework(const PeriodicFramework& fw) { return framework_to_json(fw).dump(2) + "\n"; }

}  // namespace perimax
