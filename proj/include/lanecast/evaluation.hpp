#pragma once

// Accuracy metrics against simulated ground truth and the benchmark harness.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lanecast/pipeline.hpp"
#include "lanecast/simulation.hpp"

namespace lanecast {

/// Mean orthogonal distance from the estimated line (sampled every 1 m of arc)
/// to the truth line, over samples whose foot point is interior to the truth.
/// `symmetric` averages both directions. Throws NoOverlap.
double centerline_deviation(const Polyline& estimated, const Polyline& truth, bool symmetric = false);

struct LaneMatch {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (estimated, truth)
  std::vector<double> deviations;                          // per pair
  std::vector<std::size_t> misses;                         // unmatched truth lanes
  std::vector<std::size_t> ghosts;                         // unmatched estimated lanes

  /// Truth lane matched to an estimated lane, if any.
  std::optional<std::size_t> truth_of(std::size_t estimated) const;
};

/// Greedy matching on the deviation matrix: cheapest pair first, ties by
/// (estimated, truth) index; pairs at or above max_deviation stay unmatched.
LaneMatch match_lanes(const std::vector<Polyline>& estimated, const std::vector<Polyline>& truth,
                      double max_deviation = kLaneWidth, bool symmetric = false);

struct StructuralCheck {
  bool arm_count = false;
  bool lane_counts = false;
  bool ok() const { return arm_count && lane_counts; }
};

/// Arms are paired greedily by angular distance (within angle_tolerance);
/// lane counts must agree on every pair.
StructuralCheck check_structure(const Intersection& estimated, const Intersection& truth,
                                double angle_tolerance = 15.0 * kPi / 180.0);

/// Share of trajectories whose estimated lane is matched to their true lane.
double association_accuracy(const std::vector<std::size_t>& estimated_lane_of,
                            const std::vector<std::size_t>& truth_lane_of, const LaneMatch& match);

struct EvalReport {
  std::string id;
  double mean_deviation = 0.0;  // mean of per-lane deviations over matched lanes
  std::vector<double> lane_deviations;
  std::size_t matched = 0;
  std::size_t misses = 0;
  std::size_t ghosts = 0;
  StructuralCheck structural;
  double association_accuracy = 0.0;
  Timings timings;
  int arms = 0;
  int lanes = 0;
  std::size_t measurements = 0;
  bool failed = false;
  std::string error;
};

/// Compares an estimate with ground truth. truth_lane_of may be empty when the
/// labels are unknown; accuracy is then reported as 0.
EvalReport evaluate(const Estimate& estimate, const Intersection& truth, const std::vector<GroundTruthLane>& lanes,
                    const std::vector<std::size_t>& truth_lane_of);

/// Same comparison from bare center lines, as read back from files.
EvalReport evaluate_lines(const std::vector<Polyline>& estimated, const std::vector<Polyline>& truth,
                          bool symmetric = false);

struct BenchmarkConfig {
  int intersections = 50;
  std::uint64_t seed = 0;  // intersection i uses seed + i
  GeneratorConfig generator;
  SimConfig simulation;
  EstimatorConfig estimator;
};

struct Summary {
  int count = 0;
  int failures = 0;
  int structural_ok = 0;
  double mean_deviation = 0.0;             // over structurally correct runs
  double median_deviation = 0.0;
  double p95_deviation = 0.0;
  double mean_deviation_all = 0.0;         // over every successful run
  double mean_association_accuracy = 0.0;
  double mean_coarse_ms = 0.0;
  double mean_refine_ms = 0.0;
  double max_total_ms = 0.0;
};

struct BenchmarkReport {
  std::vector<EvalReport> rows;
  Summary summary;
};

/// Aggregates rows. Deviation statistics use structurally correct rows only.
Summary summarize(const std::vector<EvalReport>& rows);

/// Seeds for intersection i: scene seed + i, simulation and chain seeds
/// derived from it.
std::uint64_t simulation_seed(std::uint64_t scene_seed);
std::uint64_t chain_seed(std::uint64_t scene_seed);

using BenchmarkProgress = std::function<void(const EvalReport&)>;
BenchmarkReport run_benchmark(const BenchmarkConfig& cfg, const BenchmarkProgress& progress = {});

}  // namespace lanecast
