#include "lanecast/pipeline.hpp"

#include <chrono>
#include <map>

#include "lanecast/error.hpp"

namespace lanecast {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

Estimate estimate(const std::vector<Trajectory>& trajectories, const EstimatorConfig& cfg,
                  const StepObserver& observer) {
  if (trajectories.empty()) throw SchemaError("dataset holds no trajectories");
  for (const auto& t : trajectories) validate(t);
  cfg.refinement.validate();

  Estimate out;
  auto start = std::chrono::steady_clock::now();
  out.chain = run_chain(trajectories, cfg.chain, observer);
  out.intersection = out.chain.best;
  out.timings.coarse_ms = elapsed_ms(start);

  start = std::chrono::steady_clock::now();
  out.associations = associate(trajectories, out.intersection, cfg.refinement.stub_length);
  auto lanes = initialize_lanes(out.associations, trajectories, out.intersection, cfg.refinement);
  std::map<std::pair<StubId, StubId>, std::size_t> index;
  for (std::size_t l = 0; l < lanes.size(); ++l) index[{lanes[l].entry, lanes[l].exit}] = l;
  out.lane_of.reserve(trajectories.size());
  for (const auto& a : out.associations) out.lane_of.push_back(index.at({a.entry, a.exit}));

  out.neighbors = neighbor_pairs(lanes);
  out.refinement = refine(std::move(lanes), out.neighbors, trajectories, cfg.refinement,
                          out.intersection.lane_width);
  for (const auto& l : out.refinement.lanes) out.center_lines.push_back(l.center_line());
  out.map = merge_lanelets(out.center_lines, 0.5 * out.intersection.lane_width);
  out.timings.refine_ms = elapsed_ms(start);
  return out;
}

}  // namespace lanecast
