#pragma once

// Planar geometry shared by all modules. Everything lives in a local metric
// frame; headings are radians normalized to [-pi, pi).

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace lanecast {

inline constexpr double kPi = std::numbers::pi;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  Point2& operator+=(const Point2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  bool operator==(const Point2&) const = default;
};

inline Point2 operator*(double s, const Point2& p) { return p * s; }
inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Point2& a, const Point2& b) { return norm(a - b); }
inline bool is_finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Unit vector pointing along `angle`.
inline Point2 direction(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Wraps an angle into [-pi, pi).
double normalize_angle(double a);

/// normalize(a - b); the signed smallest rotation taking b onto a.
inline double angle_diff(double a, double b) { return normalize_angle(a - b); }

struct Pose2 {
  Point2 position;
  double heading = 0.0;
};

/// Rotated and translated coordinate frame. Coordinates expressed in the frame
/// are obtained by removing `origin` and rotating by -rotation.
struct Frame2 {
  Point2 origin;
  double rotation = 0.0;
};

Point2 to_frame(const Point2& p, const Frame2& f);
Point2 from_frame(const Point2& p, const Frame2& f);
/// Rotates a free vector (no translation) into / out of the frame.
Point2 vector_to_frame(const Point2& v, const Frame2& f);
Point2 vector_from_frame(const Point2& v, const Frame2& f);

/// Circular mean atan2(sum sin, sum cos). Throws DegenerateHeadings on an
/// empty list or when the resultant length is below 1e-9.
double mean_heading(std::span<const double> headings);

/// Ordered list of at least two distinct points.
class Polyline {
 public:
  Polyline() = default;
  /// Throws InvalidGeometry for fewer than two points, non-finite
  /// coordinates or consecutive points closer than 1e-9 m.
  explicit Polyline(std::vector<Point2> points);

  /// Like the constructor but drops consecutive near-duplicates first.
  static Polyline from_points_dedup(std::vector<Point2> points);

  const std::vector<Point2>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  /// Arc length at vertex i.
  double arc_at(std::size_t i) const { return cumulative_[i]; }

  /// Point at arc position s, clamped to [0, length].
  Point2 point_at(double s) const;
  /// Unit tangent at arc position s.
  Point2 tangent_at(double s) const;
  /// Resamples at (approximately) uniform arc spacing, keeping both ends.
  Polyline resampled(double spacing) const;
  Polyline reversed() const;

 private:
  std::size_t segment_at(double s) const;

  std::vector<Point2> points_;
  std::vector<double> cumulative_;
};

struct NearestPoint {
  Point2 point;
  double distance = 0.0;
  double arc_position = 0.0;
  /// Index of the segment that holds the foot point.
  std::size_t segment = 0;
};

/// Closest point on the polyline; ties go to the smallest arc position.
NearestPoint nearest_point_on_polyline(const Point2& p, const Polyline& line);

/// Distance from p to the segment [a, b] together with the clamped segment
/// parameter in [0, 1].
struct SegmentProjection {
  double distance = 0.0;
  double t = 0.0;
};
SegmentProjection project_on_segment(const Point2& p, const Point2& a, const Point2& b);

}  // namespace lanecast
