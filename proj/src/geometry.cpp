#include "lanecast/geometry.hpp"

#include <algorithm>
#include <limits>

#include "lanecast/error.hpp"

namespace lanecast {

double normalize_angle(double a) {
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  r -= kPi;
  // fmod can round up to exactly pi.
  if (r >= kPi) r -= 2.0 * kPi;
  return r;
}

Point2 to_frame(const Point2& p, const Frame2& f) { return vector_to_frame(p - f.origin, f); }

Point2 from_frame(const Point2& p, const Frame2& f) { return vector_from_frame(p, f) + f.origin; }

Point2 vector_to_frame(const Point2& v, const Frame2& f) {
  const double c = std::cos(f.rotation);
  const double s = std::sin(f.rotation);
  return {c * v.x + s * v.y, -s * v.x + c * v.y};
}

Point2 vector_from_frame(const Point2& v, const Frame2& f) {
  const double c = std::cos(f.rotation);
  const double s = std::sin(f.rotation);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double mean_heading(std::span<const double> headings) {
  if (headings.empty()) throw DegenerateHeadings();
  double sx = 0.0;
  double sy = 0.0;
  for (double h : headings) {
    sx += std::cos(h);
    sy += std::sin(h);
  }
  if (std::hypot(sx, sy) < 1e-9) throw DegenerateHeadings();
  return normalize_angle(std::atan2(sy, sx));
}

Polyline::Polyline(std::vector<Point2> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw InvalidGeometry("polyline needs at least two points");
  cumulative_.reserve(points_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!is_finite(points_[i])) throw InvalidGeometry("polyline has non-finite coordinates");
    if (i == 0) continue;
    const double d = distance(points_[i - 1], points_[i]);
    if (d <= 1e-9) throw InvalidGeometry("polyline has coincident consecutive points");
    cumulative_.push_back(cumulative_.back() + d);
  }
}

Polyline Polyline::from_points_dedup(std::vector<Point2> points) {
  std::vector<Point2> kept;
  kept.reserve(points.size());
  for (const auto& p : points) {
    if (kept.empty() || distance(kept.back(), p) > 1e-9) kept.push_back(p);
  }
  return Polyline(std::move(kept));
}

std::size_t Polyline::segment_at(double s) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t idx = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  return std::min(idx, points_.size() - 2);
}

Point2 Polyline::point_at(double s) const {
  s = std::clamp(s, 0.0, length());
  const std::size_t i = segment_at(s);
  const double seg = cumulative_[i + 1] - cumulative_[i];
  const double t = (s - cumulative_[i]) / seg;
  return points_[i] + (points_[i + 1] - points_[i]) * t;
}

Point2 Polyline::tangent_at(double s) const {
  const std::size_t i = segment_at(std::clamp(s, 0.0, length()));
  const Point2 d = points_[i + 1] - points_[i];
  return d * (1.0 / norm(d));
}

Polyline Polyline::resampled(double spacing) const {
  const double len = length();
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / spacing - 1e-9)));
  std::vector<Point2> out;
  out.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out.push_back(point_at(len * static_cast<double>(k) / static_cast<double>(n)));
  return Polyline(std::move(out));
}

Polyline Polyline::reversed() const {
  std::vector<Point2> pts(points_.rbegin(), points_.rend());
  return Polyline(std::move(pts));
}

SegmentProjection project_on_segment(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return {distance(p, a + ab * t), t};
}

NearestPoint nearest_point_on_polyline(const Point2& p, const Polyline& line) {
  const auto& pts = line.points();
  NearestPoint best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto proj = project_on_segment(p, pts[i], pts[i + 1]);
    // Strict comparison keeps the earliest (smallest arc) foot on ties.
    if (proj.distance < best.distance) {
      best.distance = proj.distance;
      best.point = pts[i] + (pts[i + 1] - pts[i]) * proj.t;
      best.arc_position = line.arc_at(i) + proj.t * (line.arc_at(i + 1) - line.arc_at(i));
      best.segment = i;
    }
  }
  return best;
}

}  // namespace lanecast
