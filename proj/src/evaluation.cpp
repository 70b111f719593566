#include "lanecast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "lanecast/error.hpp"

namespace lanecast {

namespace {

double one_way_deviation(const Polyline& estimated, const Polyline& truth) {
  const Polyline samples = estimated.resampled(1.0);
  const double end = truth.length();
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : samples.points()) {
    const NearestPoint foot = nearest_point_on_polyline(p, truth);
    if (foot.arc_position <= 1e-9 || foot.arc_position >= end - 1e-9) continue;
    sum += foot.distance;
    ++count;
  }
  if (count == 0) throw NoOverlap();
  return sum / static_cast<double>(count);
}

}  // namespace

double centerline_deviation(const Polyline& estimated, const Polyline& truth, bool symmetric) {
  const double forward = one_way_deviation(estimated, truth);
  if (!symmetric) return forward;
  return 0.5 * (forward + one_way_deviation(truth, estimated));
}

std::optional<std::size_t> LaneMatch::truth_of(std::size_t estimated) const {
  for (const auto& [e, t] : pairs) {
    if (e == estimated) return t;
  }
  return std::nullopt;
}

LaneMatch match_lanes(const std::vector<Polyline>& estimated, const std::vector<Polyline>& truth,
                      double max_deviation, bool symmetric) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
  for (std::size_t e = 0; e < estimated.size(); ++e) {
    for (std::size_t t = 0; t < truth.size(); ++t) {
      try {
        const double d = centerline_deviation(estimated[e], truth[t], symmetric);
        if (d < max_deviation) candidates.emplace_back(d, e, t);
      } catch (const NoOverlap&) {
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  LaneMatch m;
  std::vector<bool> used_e(estimated.size(), false);
  std::vector<bool> used_t(truth.size(), false);
  for (const auto& [d, e, t] : candidates) {
    if (used_e[e] || used_t[t]) continue;
    used_e[e] = used_t[t] = true;
    m.pairs.emplace_back(e, t);
    m.deviations.push_back(d);
  }
  for (std::size_t t = 0; t < truth.size(); ++t)
    if (!used_t[t]) m.misses.push_back(t);
  for (std::size_t e = 0; e < estimated.size(); ++e)
    if (!used_e[e]) m.ghosts.push_back(e);
  return m;
}

StructuralCheck check_structure(const Intersection& estimated, const Intersection& truth, double angle_tolerance) {
  StructuralCheck s;
  s.arm_count = estimated.arms.size() == truth.arms.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
  for (std::size_t e = 0; e < estimated.arms.size(); ++e) {
    for (std::size_t t = 0; t < truth.arms.size(); ++t) {
      const double d = std::abs(angle_diff(estimated.arms[e].alpha, truth.arms[t].alpha));
      if (d <= angle_tolerance) candidates.emplace_back(d, e, t);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  std::vector<bool> used_e(estimated.arms.size(), false);
  std::vector<bool> used_t(truth.arms.size(), false);
  std::size_t matched = 0;
  bool counts = true;
  for (const auto& [d, e, t] : candidates) {
    if (used_e[e] || used_t[t]) continue;
    used_e[e] = used_t[t] = true;
    ++matched;
    const Arm& a = estimated.arms[e];
    const Arm& b = truth.arms[t];
    counts = counts && a.entries == b.entries && a.exits == b.exits;
  }
  s.lane_counts = s.arm_count && matched == truth.arms.size() && counts;
  return s;
}

double association_accuracy(const std::vector<std::size_t>& estimated_lane_of,
                            const std::vector<std::size_t>& truth_lane_of, const LaneMatch& match) {
  if (estimated_lane_of.empty() || estimated_lane_of.size() != truth_lane_of.size()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < estimated_lane_of.size(); ++i) {
    const auto t = match.truth_of(estimated_lane_of[i]);
    if (t && *t == truth_lane_of[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(estimated_lane_of.size());
}

EvalReport evaluate_lines(const std::vector<Polyline>& estimated, const std::vector<Polyline>& truth,
                          bool symmetric) {
  EvalReport r;
  const LaneMatch m = match_lanes(estimated, truth, kLaneWidth, symmetric);
  r.lane_deviations = m.deviations;
  r.matched = m.pairs.size();
  r.misses = m.misses.size();
  r.ghosts = m.ghosts.size();
  if (!m.deviations.empty()) {
    r.mean_deviation = std::accumulate(m.deviations.begin(), m.deviations.end(), 0.0) /
                       static_cast<double>(m.deviations.size());
  }
  return r;
}

EvalReport evaluate(const Estimate& estimate, const Intersection& truth, const std::vector<GroundTruthLane>& lanes,
                    const std::vector<std::size_t>& truth_lane_of) {
  std::vector<Polyline> truth_lines;
  truth_lines.reserve(lanes.size());
  for (const auto& l : lanes) truth_lines.push_back(l.center_line);
  EvalReport r = evaluate_lines(estimate.center_lines, truth_lines);
  r.structural = check_structure(estimate.intersection, truth);
  r.association_accuracy =
      association_accuracy(estimate.lane_of, truth_lane_of, match_lanes(estimate.center_lines, truth_lines));
  r.timings = estimate.timings;
  r.arms = static_cast<int>(truth.arms.size());
  r.lanes = static_cast<int>(lanes.size());
  return r;
}

Summary summarize(const std::vector<EvalReport>& rows) {
  Summary s;
  s.count = static_cast<int>(rows.size());
  std::vector<double> structural;
  double all_sum = 0.0;
  int ok_rows = 0;
  for (const auto& r : rows) {
    if (r.failed) {
      ++s.failures;
      continue;
    }
    ++ok_rows;
    all_sum += r.mean_deviation;
    s.mean_association_accuracy += r.association_accuracy;
    s.mean_coarse_ms += r.timings.coarse_ms;
    s.mean_refine_ms += r.timings.refine_ms;
    s.max_total_ms = std::max(s.max_total_ms, r.timings.coarse_ms + r.timings.refine_ms);
    if (r.structural.ok()) {
      ++s.structural_ok;
      structural.push_back(r.mean_deviation);
    }
  }
  if (ok_rows > 0) {
    s.mean_deviation_all = all_sum / ok_rows;
    s.mean_association_accuracy /= ok_rows;
    s.mean_coarse_ms /= ok_rows;
    s.mean_refine_ms /= ok_rows;
  }
  if (!structural.empty()) {
    s.mean_deviation = std::accumulate(structural.begin(), structural.end(), 0.0) /
                       static_cast<double>(structural.size());
    std::sort(structural.begin(), structural.end());
    const std::size_t n = structural.size();
    s.median_deviation = n % 2 == 1 ? structural[n / 2] : 0.5 * (structural[n / 2 - 1] + structural[n / 2]);
    // Nearest-rank percentile.
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    s.p95_deviation = structural[std::max<std::size_t>(rank, 1) - 1];
  }
  return s;
}

std::uint64_t simulation_seed(std::uint64_t scene_seed) { return scene_seed * 3 + 1; }
std::uint64_t chain_seed(std::uint64_t scene_seed) { return scene_seed * 3 + 2; }

BenchmarkReport run_benchmark(const BenchmarkConfig& cfg, const BenchmarkProgress& progress) {
  if (cfg.intersections < 1) throw InvalidConfig("benchmark needs at least one intersection");
  cfg.simulation.validate();
  BenchmarkReport report;
  for (int i = 0; i < cfg.intersections; ++i) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
    EvalReport row;
    row.id = "i" + std::to_string(seed);
    try {
      const Scene scene = random_intersection(seed, cfg.generator);
      SimConfig sim = cfg.simulation;
      sim.seed = simulation_seed(seed);
      const SimulationResult data = simulate(scene.lanes, sim);
      EstimatorConfig est = cfg.estimator;
      est.chain.seed = chain_seed(seed);
      const Estimate e = estimate(data.trajectories, est);
      const std::string id = row.id;
      row = evaluate(e, scene.intersection, scene.lanes, data.lane_of);
      row.id = id;
      row.measurements = measurement_count(data.trajectories);
    } catch (const Error& err) {
      row.failed = true;
      row.error = err.what();
    }
    if (progress) progress(row);
    report.rows.push_back(std::move(row));
  }
  report.summary = summarize(report.rows);
  return report;
}

}  // namespace lanecast
