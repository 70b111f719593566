#pragma once

// Static SVG picture of an estimate: arm stubs, lanelets and trajectories.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lanecast/intersection.hpp"
#include "lanecast/simulation.hpp"

namespace lanecast {

struct SvgStyle {
  double pixels_per_meter = 6.0;
  double margin = 5.0;  // meters
  int precision = 2;    // decimals of pixel coordinates
};

/// One <path id="lanelet-N"> per lanelet and one <polyline> per trajectory.
/// The y axis points up in the picture.
std::string render_svg(const std::vector<std::pair<int, Polyline>>& lanelets,
                       const std::vector<Trajectory>& trajectories,
                       const std::optional<Intersection>& intersection = std::nullopt, const SvgStyle& style = {});

}  // namespace lanecast
