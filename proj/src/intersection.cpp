#include "lanecast/intersection.hpp"

#include <algorithm>
#include <limits>

#include "lanecast/error.hpp"

namespace lanecast {

const char* to_string(Direction d) { return d == Direction::Entry ? "entry" : "exit"; }

void Intersection::sort_arms() {
  for (auto& a : arms) a.alpha = normalize_angle(a.alpha);
  std::stable_sort(arms.begin(), arms.end(), [](const Arm& a, const Arm& b) { return a.alpha < b.alpha; });
}

int Intersection::lane_count() const {
  int n = 0;
  for (const auto& a : arms) n += a.entries + a.exits;
  return n;
}

int Intersection::stub_count(Direction d) const {
  int n = 0;
  for (const auto& a : arms) n += a.lanes(d);
  return n;
}

double lateral_offset(const Arm& arm, Direction d, int slot, double lane_width) {
  const double magnitude = 0.5 * arm.gap + 0.5 * lane_width + slot * lane_width;
  return d == Direction::Entry ? -magnitude : magnitude;
}

double driving_heading(const Arm& arm, Direction d) {
  return d == Direction::Entry ? normalize_angle(arm.alpha + kPi) : normalize_angle(arm.alpha);
}

double border_radius(const Intersection& I) {
  double widest = 0.0;
  for (const auto& a : I.arms) {
    widest = std::max(widest, 0.5 * a.gap + std::max(a.entries, a.exits) * I.lane_width);
  }
  return widest + kBorderClearance;
}

double min_arm_separation(const Intersection& I) {
  const std::size_t n = I.arms.size();
  if (n < 2) return 2.0 * kPi;
  double best = 2.0 * kPi;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      best = std::min(best, std::abs(angle_diff(I.arms[i].alpha, I.arms[j].alpha)));
    }
  }
  return best;
}

bool is_valid(const Intersection& I, const ValidityLimits& limits) {
  if (!is_finite(I.center)) return false;
  if (static_cast<int>(I.arms.size()) > limits.max_arms) return false;
  for (const auto& a : I.arms) {
    if (!std::isfinite(a.alpha) || !std::isfinite(a.gap)) return false;
    if (a.gap < 0.0 || a.gap > limits.max_gap) return false;
    if (a.entries < 0 || a.exits < 0 || a.entries + a.exits < 1) return false;
    if (a.entries > limits.max_lanes_per_direction || a.exits > limits.max_lanes_per_direction) return false;
  }
  return min_arm_separation(I) >= limits.min_separation;
}

LaneStub make_stub(const Intersection& I, const StubId& id, double stub_length) {
  const Arm& arm = I.arms.at(static_cast<std::size_t>(id.arm));
  const Point2 axis = arm_axis(arm);
  const double offset = lateral_offset(arm, id.direction, id.slot, I.lane_width);
  const double r = border_radius(I);
  const Point2 base = I.center + arm_normal(arm) * offset;
  const Point2 inner = base + axis * r;
  const Point2 outer = base + axis * (r + stub_length);
  LaneStub s;
  s.id = id;
  s.center_line = id.direction == Direction::Entry ? Polyline({outer, inner}) : Polyline({inner, outer});
  s.stub_length = stub_length;
  s.lateral_offset = offset;
  s.heading = driving_heading(arm, id.direction);
  return s;
}

std::vector<LaneStub> stubs(const Intersection& I, double stub_length) {
  std::vector<LaneStub> out;
  out.reserve(static_cast<std::size_t>(I.lane_count()));
  for (int a = 0; a < static_cast<int>(I.arms.size()); ++a) {
    for (Direction d : {Direction::Entry, Direction::Exit}) {
      for (int slot = 0; slot < I.arms[static_cast<std::size_t>(a)].lanes(d); ++slot) {
        out.push_back(make_stub(I, {a, d, slot}, stub_length));
      }
    }
  }
  return out;
}

NearestStub nearest_stub(const Intersection& I, const Pose2& pose, Direction direction, double stub_length) {
  std::optional<NearestStub> best;
  for (auto& s : stubs(I, stub_length)) {
    if (s.direction() != direction) continue;
    const auto& pts = s.center_line.points();
    const double d = project_on_segment(pose.position, pts[0], pts[1]).distance;
    // Stubs arrive in (arm, slot) order, so strict < keeps the lower index on ties.
    if (!best || d < best->distance) {
      const double dev = angle_diff(pose.heading, s.heading);
      best = NearestStub{std::move(s), d, dev};
    }
  }
  if (!best) throw NoStub();
  return *best;
}

Intersection rotated(const Intersection& I, double theta) {
  Intersection out = I;
  for (auto& a : out.arms) a.alpha += theta;
  out.sort_arms();
  return out;
}

Intersection translated(const Intersection& I, const Point2& offset) {
  Intersection out = I;
  out.center += offset;
  return out;
}

}  // namespace lanecast
