#pragma once

// Lane course refinement: full lanes built from associated stubs, each lane a
// cubic spline y = f(x) in its own rotated frame, fitted jointly with a staged
// Levenberg-Marquardt solver and finally merged into lanelets.

#include <string>
#include <vector>

#include "lanecast/bspline.hpp"
#include "lanecast/geometry.hpp"
#include "lanecast/intersection.hpp"
#include "lanecast/simulation.hpp"

namespace lanecast {

struct TrajectoryAssociation {
  StubId entry;
  StubId exit;
  double entry_distance = 0.0;  // mean distance of the approaching part
  double exit_distance = 0.0;
  std::size_t split = 0;        // sample closest to the center
};

/// Nearest entry / exit stub per trajectory by mean point-to-stub distance.
/// The trajectory is split at its sample closest to the center; that sample
/// belongs to both parts. Throws UnassignableTrajectory when no sample comes
/// within 3 * stub_length of the center, NoStub when a direction is missing.
std::vector<TrajectoryAssociation> associate(const std::vector<Trajectory>& trajectories, const Intersection& I,
                                             double stub_length = kDefaultStubLength);

struct RefinementConfig {
  int control_points = kDefaultControlPoints;
  int stage1_iterations = 10;
  int total_iterations = 30;
  double delta = 1.5 * kLaneWidth;
  int e2_samples_per_lane = 50;
  double initial_damping = 1e-3;
  double max_damping = 1e8;
  double tolerance = 1e-8;  // relative cost change that ends a stage
  // Scales the e2 residual; 1 is the bare d(|d| - w).
  double e2_weight = 0.05;
  double stub_length = kDefaultStubLength;
  /// The initial polyline extends both stubs outward by this much.
  double stub_extension = 10.0;

  /// Throws InvalidConfig.
  void validate(double lane_width = kLaneWidth) const;
};

struct Lane {
  StubId entry;
  StubId exit;
  std::vector<std::size_t> assigned;  // trajectory indices
  Frame2 frame;
  UniformCubicSpline spline;

  Point2 point_at(double x) const { return from_frame({x, spline.eval(x)}, frame); }
  /// World-frame center line over the spline domain, about `spacing` apart.
  Polyline center_line(double spacing = 0.5) const;
};

/// Straight entry stub, chord, exit stub; the stubs are extended outward.
Polyline initial_polyline(const Intersection& I, const StubId& entry, const StubId& exit,
                          const RefinementConfig& cfg = {});

/// One lane per distinct (entry, exit) pair, ordered by (entry, exit).
std::vector<Lane> initialize_lanes(const std::vector<TrajectoryAssociation>& associations,
                                   const std::vector<Trajectory>& trajectories, const Intersection& I,
                                   const RefinementConfig& cfg = {});

enum class NeighborRelation { SharedEntry, SharedExit, Adjacent };
const char* to_string(NeighborRelation r);

struct NeighborPair {
  std::size_t a = 0;
  std::size_t b = 0;  // a < b
  NeighborRelation relation = NeighborRelation::SharedEntry;
};

/// Lanes sharing an entry, sharing an exit, or whose entry (or exit) stubs sit
/// in neighboring slots of the same arm.
std::vector<NeighborPair> neighbor_pairs(const std::vector<Lane>& lanes);

struct ResidualE1 {
  double residual = 0.0;
  DesignRow jacobian;  // w.r.t. the lane's control points
};

/// p_y - f(p_x) in the lane frame. Throws OutOfDomain.
ResidualE1 residual_e1(const Lane& lane, const Point2& p);

struct ResidualE2 {
  double residual = 0.0;
  double d_perp = 0.0;
  /// |d_perp| >= delta: the residual is held at delta * (delta - w) and the
  /// Jacobian is zero.
  bool gated = false;
  DesignRow jacobian_a;
  DesignRow jacobian_b;
};

/// d(|d| - w) with d = n_a . (a_B^y - f_B(a_B^x)) for the point of lane a at
/// frame abscissa x_a. Throws OutOfDomain when x_a or its image in b's frame
/// lies outside the respective domain.
ResidualE2 residual_e2(const Lane& a, const Lane& b, double x_a, double lane_width, double delta);

/// Evaluation abscissae equidistant in arc length along the lane.
std::vector<double> e2_sample_positions(const Lane& lane, int count);

struct CostSample {
  int iteration = 0;
  int stage = 1;
  double cost = 0.0;
  double damping = 0.0;
};

struct RefinementResult {
  std::vector<Lane> lanes;
  std::vector<CostSample> cost_trace;  // one entry per stage start and per iteration
  int iterations = 0;
  bool diverged = false;
  std::size_t skipped_points = 0;
};

/// One e2 evaluation point: lane a at frame abscissa x, measured against lane b.
struct E2Sample {
  std::size_t a = 0;
  std::size_t b = 0;
  double x = 0.0;
};
/// Both directions of every pair, fixed for the whole of stage 2.
std::vector<E2Sample> e2_samples(const std::vector<Lane>& lanes, const std::vector<NeighborPair>& pairs,
                                 int samples_per_lane);

/// Stage 1 (e1) for stage1_iterations, then stage 2 (e1 + e2) until
/// total_iterations. Sets `diverged` when damping exceeds max_damping; the
/// best iterate is returned in every case.
RefinementResult refine(std::vector<Lane> lanes, const std::vector<NeighborPair>& pairs,
                        const std::vector<Trajectory>& trajectories, const RefinementConfig& cfg = {},
                        double lane_width = kLaneWidth);

struct Lanelet {
  int id = 0;
  Polyline center_line;
  std::vector<int> predecessors;
  std::vector<int> successors;
  std::vector<std::size_t> lanes;  // source lanes running along this lanelet
};

struct LaneletMap {
  std::vector<Lanelet> lanelets;
  std::vector<std::string> merge_log;
};

/// Cuts every lane where the set of lanes within `tolerance` changes and
/// merges pieces that cover each other into shared lanelets.
LaneletMap merge_lanelets(const std::vector<Polyline>& lanes, double tolerance = 0.5 * kLaneWidth);

}  // namespace lanecast
