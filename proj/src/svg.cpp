#include "lanecast/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "lanecast/error.hpp"

namespace lanecast {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

class Canvas {
 public:
  Canvas(double x_min, double y_max, const SvgStyle& style) : x_min_(x_min), y_max_(y_max), style_(style) {}

  std::string xy(const Point2& p) const { return num(px(p.x)) + "," + num(py(p.y)); }
  double px(double x) const { return (x - x_min_) * style_.pixels_per_meter; }
  double py(double y) const { return (y_max_ - y) * style_.pixels_per_meter; }

  std::string num(double v) const {
    if (std::abs(v) < 0.5 * std::pow(10.0, -style_.precision)) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", style_.precision, v);
    return buf;
  }

 private:
  double x_min_;
  double y_max_;
  SvgStyle style_;
};

}  // namespace

std::string render_svg(const std::vector<std::pair<int, Polyline>>& lanelets,
                       const std::vector<Trajectory>& trajectories, const std::optional<Intersection>& intersection,
                       const SvgStyle& style) {
  if (!(style.pixels_per_meter > 0.0) || !(style.margin >= 0.0) || style.precision < 0 || style.precision > 9)
    throw InvalidConfig("bad SVG style");

  std::vector<LaneStub> stub_lines;
  if (intersection) stub_lines = stubs(*intersection);

  double x0 = std::numeric_limits<double>::infinity();
  double y0 = x0;
  double x1 = -x0;
  double y1 = -x0;
  auto grow = [&](const Point2& p) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  };
  for (const auto& [id, line] : lanelets)
    for (const auto& p : line.points()) grow(p);
  for (const auto& t : trajectories)
    for (const auto& m : t.samples) grow(m.position());
  for (const auto& s : stub_lines)
    for (const auto& p : s.center_line.points()) grow(p);
  if (intersection) grow(intersection->center);
  if (!std::isfinite(x0)) x0 = y0 = x1 = y1 = 0.0;
  x0 -= style.margin;
  y0 -= style.margin;
  x1 += style.margin;
  y1 += style.margin;

  const Canvas c(x0, y1, style);
  const double width = c.px(x1);
  const double height = c.py(y0);
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << c.num(width) << "\" height=\"" << c.num(height)
      << "\" viewBox=\"0 0 " << c.num(width) << ' ' << c.num(height) << "\">\n";
  out << "  <defs>\n"
         "    <marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"8\" refY=\"5\" markerWidth=\"5\" markerHeight=\"5\" "
         "orient=\"auto\">\n"
         "      <polygon points=\"0,0 10,5 0,10\" fill=\"#c0392b\"/>\n"
         "    </marker>\n"
         "  </defs>\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (intersection) {
    out << "  <g id=\"stubs\" stroke=\"#bbbbbb\" stroke-width=\"" << c.num(intersection->lane_width * style.pixels_per_meter)
        << "\" stroke-linecap=\"butt\">\n";
    for (const auto& s : stub_lines) {
      const auto& pts = s.center_line.points();
      out << "    <line x1=\"" << c.num(c.px(pts.front().x)) << "\" y1=\"" << c.num(c.py(pts.front().y))
          << "\" x2=\"" << c.num(c.px(pts.back().x)) << "\" y2=\"" << c.num(c.py(pts.back().y)) << "\"/>\n";
    }
    out << "  </g>\n";
  }

  out << "  <g id=\"trajectories\" fill=\"none\" stroke=\"#2e86c1\" stroke-width=\"1\" stroke-opacity=\"0.6\">\n";
  for (const auto& t : trajectories) {
    out << "    <polyline data-id=\"" << escape(t.id) << "\" points=\"";
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
      if (i) out << ' ';
      out << c.xy(t.samples[i].position());
    }
    out << "\"/>\n";
  }
  out << "  </g>\n";

  out << "  <g id=\"lanelets\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" marker-end=\"url(#arrow)\">\n";
  for (const auto& [id, line] : lanelets) {
    out << "    <path id=\"lanelet-" << id << "\" d=\"";
    const auto& pts = line.points();
    for (std::size_t i = 0; i < pts.size(); ++i) out << (i ? " L" : "M") << c.xy(pts[i]);
    out << "\"/>\n";
  }
  out << "  </g>\n";

  if (intersection) {
    out << "  <circle id=\"center\" cx=\"" << c.num(c.px(intersection->center.x)) << "\" cy=\""
        << c.num(c.py(intersection->center.y)) << "\" r=\"3\" fill=\"black\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace lanecast
