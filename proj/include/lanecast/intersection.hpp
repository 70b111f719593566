#pragma once

// Coarse parametric intersection model: a center point and a set of arms,
// each arm carrying an orientation, a median gap and entry/exit lane counts.
// Lane stubs are straight center lines derived from these parameters.

#include <compare>
#include <optional>
#include <vector>

#include "lanecast/geometry.hpp"

namespace lanecast {

inline constexpr double kLaneWidth = 2.7;
inline constexpr double kDefaultStubLength = 30.0;
inline constexpr double kMinArmSeparation = 25.0 * kPi / 180.0;
/// Clearance added to the widest arm when computing the border radius.
inline constexpr double kBorderClearance = 2.0;

enum class Direction { Entry = 0, Exit = 1 };

const char* to_string(Direction d);

struct Arm {
  double alpha = 0.0;  // orientation from the center, radians
  double gap = 0.0;    // separation between the entry and exit blocks, meters
  int entries = 1;
  int exits = 1;

  int lanes(Direction d) const { return d == Direction::Entry ? entries : exits; }
  int& lanes(Direction d) { return d == Direction::Entry ? entries : exits; }
  bool operator==(const Arm&) const = default;
};

struct Intersection {
  Point2 center;
  std::vector<Arm> arms;  // sorted by alpha
  double lane_width = kLaneWidth;

  /// Normalizes every alpha and restores the alpha ordering.
  void sort_arms();
  int lane_count() const;
  int stub_count(Direction d) const;
  bool operator==(const Intersection&) const = default;
};

/// Identifies a stub by (arm, direction, slot). Slot 0 is the lane closest to
/// the arm axis. Ordering is the deterministic stub ordering.
struct StubId {
  int arm = 0;
  Direction direction = Direction::Entry;
  int slot = 0;
  auto operator<=>(const StubId&) const = default;
};

struct LaneStub {
  StubId id;
  /// Straight line of stub_length; entries point toward the center, exits away.
  Polyline center_line;
  double stub_length = kDefaultStubLength;
  /// Signed offset along the right-hand normal of the outward arm axis.
  double lateral_offset = 0.0;
  /// Driving direction along the stub.
  double heading = 0.0;

  int arm_index() const { return id.arm; }
  Direction direction() const { return id.direction; }
  int slot() const { return id.slot; }
};

/// Outward unit vector of an arm and its right-hand normal.
inline Point2 arm_axis(const Arm& a) { return direction(a.alpha); }
inline Point2 arm_normal(const Arm& a) { return {std::sin(a.alpha), -std::cos(a.alpha)}; }

/// Lateral offset of a stub along arm_normal(). Entries are negative, exits
/// positive; slot 0 sits at gap/2 + w/2 and each further slot adds w.
double lateral_offset(const Arm& arm, Direction d, int slot, double lane_width = kLaneWidth);

/// Heading of traffic on the arm in the given direction.
double driving_heading(const Arm& arm, Direction d);

/// Distance from the center at which stubs begin.
double border_radius(const Intersection& I);

/// Smallest pairwise angular separation between arms (2*pi for < 2 arms).
double min_arm_separation(const Intersection& I);

struct ValidityLimits {
  double min_separation = kMinArmSeparation;
  double max_gap = 10.0;
  int max_lanes_per_direction = 5;
  int max_arms = 8;
};

/// Structural validity: separation, non-negative counts with at least one
/// lane per arm, gap in range, finite center.
bool is_valid(const Intersection& I, const ValidityLimits& limits = {});

/// All stubs ordered by (arm, direction, slot).
std::vector<LaneStub> stubs(const Intersection& I, double stub_length = kDefaultStubLength);

/// Builds a single stub without enumerating the whole intersection.
LaneStub make_stub(const Intersection& I, const StubId& id, double stub_length = kDefaultStubLength);

struct NearestStub {
  LaneStub stub;
  double distance = 0.0;
  double angular_deviation = 0.0;
};

/// Stub of the given direction closest to the pose position. Ties go to the
/// lower (arm, slot). Throws NoStub when no stub of that direction exists.
NearestStub nearest_stub(const Intersection& I, const Pose2& pose, Direction direction,
                         double stub_length = kDefaultStubLength);

/// Rigid motions of the whole model.
Intersection rotated(const Intersection& I, double theta);
Intersection translated(const Intersection& I, const Point2& offset);

}  // namespace lanecast
