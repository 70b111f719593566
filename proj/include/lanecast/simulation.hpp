#pragma once

// Synthetic ground-truth intersections and noisy vehicle trajectories.

#include <cstdint>
#include <string>
#include <vector>

#include "lanecast/geometry.hpp"
#include "lanecast/intersection.hpp"

namespace lanecast {

struct Measurement {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
  double t = 0.0;
  std::string id;

  Point2 position() const { return {x, y}; }
  Pose2 pose() const { return {{x, y}, phi}; }
};

struct Trajectory {
  std::string id;
  std::vector<Measurement> samples;  // strictly increasing t
};

/// Throws SchemaError unless the trajectory has >= 2 finite samples with
/// strictly increasing t, all carrying the trajectory id.
void validate(const Trajectory& trajectory);

/// Groups measurements by id (first-seen order) and sorts each group by t.
std::vector<Trajectory> group_measurements(const std::vector<Measurement>& measurements);

struct GroundTruthLane {
  Polyline center_line;
  StubId entry;
  StubId exit;
};

struct GeneratorConfig {
  int arms_min = 3;
  int arms_max = 5;
  int lanes_min = 1;
  int lanes_max = 3;
  double min_separation_deg = 25.0;
  /// Arms sit at even spacing plus a uniform jitter of this half-width.
  double jitter_deg = 15.0;
  double gap_min = 0.0;
  double gap_max = 2.0;
  /// Center drawn uniformly from [-spread, spread]^2.
  double center_spread = 10.0;
  double stub_length = kDefaultStubLength;
};

struct Scene {
  Intersection intersection;
  std::vector<GroundTruthLane> lanes;
};

/// Turn-consistent lane connections of an intersection: every entry and every
/// exit stub is used, right-most entry lanes take the right-most turns.
std::vector<GroundTruthLane> ground_truth_lanes(const Intersection& I, double stub_length = kDefaultStubLength);

/// Random intersection and its lanes; deterministic in the seed. Throws
/// GenerationFailed when no layout honoring the separation is found in 1000
/// attempts, InvalidGeometry for malformed ranges.
Scene random_intersection(std::uint64_t seed, const GeneratorConfig& cfg = {});

struct SimConfig {
  int trajectories_per_lane_min = 3;
  int trajectories_per_lane_max = 5;
  double sample_spacing = 1.0;
  double noise_sigma = 1.0;
  double noise_sigma_heading = 5.0 * kPi / 180.0;
  double assumed_speed = 10.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimulationResult {
  std::vector<Trajectory> trajectories;
  /// Index into the lane list that produced each trajectory.
  std::vector<std::size_t> lane_of;
};

/// Samples each lane's center line every sample_spacing meters and perturbs
/// positions (per-axis Gaussian) and headings. Ids are unique.
SimulationResult simulate(const std::vector<GroundTruthLane>& lanes, const SimConfig& cfg);

std::size_t measurement_count(const std::vector<Trajectory>& trajectories);

}  // namespace lanecast
