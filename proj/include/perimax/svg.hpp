#pragma once

#include <array>
#include <sstream>
#include <string>

#include "perimax/io.hpp"
#include "perimax/topology.hpp"

namespace perimax {

inline std::string face_color(int face) {
  static constexpr std::array<const char*, 10> kPalette = {"#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3",
                                                           "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd"};
  return kPalette[static_cast<std::size_t>(face) % kPalette.size()];
}

/// SVG drawing of the face copies and edge copies in `range`, faces colored by orbit.
inline std::string export_svg(const PeriodicFramework& fw, const FaceComplex& fc, const TileRange& range) {
  if (range.empty()) throw ValidationError("empty tile range");
  const FinitePatch patch = realize_patch(fw, range);
  Vec2 lo = Vec2::Constant(1e300), hi = Vec2::Constant(-1e300);
  for (const auto& v : patch.vertices) {
    lo = lo.cwiseMin(v.position);
    hi = hi.cwiseMax(v.position);
  }
  const double pad = 0.05 * fw.length_scale();
  lo -= Vec2::Constant(pad);
  hi += Vec2::Constant(pad);
  const double width = hi.x() - lo.x();
  const double height = hi.y() - lo.y();
  const double stroke = 0.01 * fw.length_scale();
  // y is flipped so the drawing has the usual mathematical orientation.
  auto pt = [&](const Vec2& p) { return format_decimal(p.x() - lo.x()) + "," + format_decimal(hi.y() - p.y()); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << format_decimal(width) << ' '
      << format_decimal(height) << "\">\n";
  for (int c2 = range.lo2; c2 < range.hi2; ++c2) {
    for (int c1 = range.lo1; c1 < range.hi1; ++c1) {
      for (const auto& f : fc.faces) {
        out << "  <polygon fill=\"" << face_color(f.id) << "\" stroke=\"none\" points=\"";
        const auto poly = face_polygon(fw, fc, {f.id, Shift{c1, c2}});
        for (std::size_t k = 0; k < poly.size(); ++k) out << (k ? " " : "") << pt(poly[k]);
        out << "\"/>\n";
      }
    }
  }
  for (const auto& e : patch.edges) {
    out << "  <line x1=\"" << format_decimal(patch.vertices[static_cast<std::size_t>(e.a)].position.x() - lo.x())
        << "\" y1=\"" << format_decimal(hi.y() - patch.vertices[static_cast<std::size_t>(e.a)].position.y())
        << "\" x2=\"" << format_decimal(patch.vertices[static_cast<std::size_t>(e.b)].position.x() - lo.x())
        << "\" y2=\"" << format_decimal(hi.y() - patch.vertices[static_cast<std::size_t>(e.b)].position.y())
        << "\" stroke=\"black\" stroke-width=\"" << format_decimal(stroke) << "\"/>\n";
  }
  for (const auto& v : patch.vertices) {
    out << "  <circle cx=\"" << format_decimal(v.position.x() - lo.x()) << "\" cy=\""
        << format_decimal(hi.y() - v.position.y()) << "\" r=\"" << format_decimal(2.0 * stroke) << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace perimax
