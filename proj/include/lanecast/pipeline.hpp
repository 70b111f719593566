#pragma once

// Coarse estimation followed by lane refinement and lanelet merging.

#include <vector>

#include "lanecast/mcmc.hpp"
#include "lanecast/refinement.hpp"

namespace lanecast {

struct EstimatorConfig {
  ChainConfig chain;
  RefinementConfig refinement;
};

struct Timings {
  double coarse_ms = 0.0;
  double refine_ms = 0.0;
};

struct Estimate {
  Intersection intersection;
  ChainResult chain;
  std::vector<TrajectoryAssociation> associations;
  std::vector<std::size_t> lane_of;  // trajectory -> index into lanes
  std::vector<NeighborPair> neighbors;
  RefinementResult refinement;
  std::vector<Polyline> center_lines;  // one per refined lane
  LaneletMap map;
  Timings timings;
};

/// Throws InvalidConfig, SchemaError for unusable input and NoStub when the
/// chain cannot start.
Estimate estimate(const std::vector<Trajectory>& trajectories, const EstimatorConfig& cfg,
                  const StepObserver& observer = {});

}  // namespace lanecast
