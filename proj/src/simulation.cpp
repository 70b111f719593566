#include "lanecast/simulation.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <unordered_map>

#include "lanecast/error.hpp"

namespace lanecast {

void validate(const Trajectory& trajectory) {
  if (trajectory.id.empty()) throw SchemaError("trajectory id must be non-empty");
  if (trajectory.samples.size() < 2) throw SchemaError("trajectory '" + trajectory.id + "' has fewer than 2 samples");
  for (std::size_t i = 0; i < trajectory.samples.size(); ++i) {
    const auto& m = trajectory.samples[i];
    if (m.id != trajectory.id) throw SchemaError("measurement id does not match its trajectory");
    if (!std::isfinite(m.x) || !std::isfinite(m.y) || !std::isfinite(m.phi) || !std::isfinite(m.t)) {
      throw SchemaError("trajectory '" + trajectory.id + "' has non-finite values");
    }
    if (i > 0 && !(m.t > trajectory.samples[i - 1].t)) {
      throw SchemaError("trajectory '" + trajectory.id + "' timestamps are not strictly increasing");
    }
  }
}

std::vector<Trajectory> group_measurements(const std::vector<Measurement>& measurements) {
  std::vector<Trajectory> out;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& m : measurements) {
    auto [it, inserted] = index.try_emplace(m.id, out.size());
    if (inserted) out.push_back(Trajectory{m.id, {}});
    out[it->second].samples.push_back(m);
  }
  for (auto& t : out) {
    std::stable_sort(t.samples.begin(), t.samples.end(),
                     [](const Measurement& a, const Measurement& b) { return a.t < b.t; });
  }
  return out;
}

namespace {

struct Connection {
  int entry_arm;
  int entry_slot;
  int exit_arm;
  double turn;      // signed turn angle, right turns negative
  int entry_rank;   // 0 = right-most entry lane
};

Point2 cubic_bezier(const Point2& p0, const Point2& p1, const Point2& p2, const Point2& p3, double t) {
  const double u = 1.0 - t;
  return p0 * (u * u * u) + p1 * (3.0 * u * u * t) + p2 * (3.0 * u * t * t) + p3 * (t * t * t);
}

Polyline connect(const LaneStub& entry, const LaneStub& exit) {
  constexpr int kConnectorSamples = 48;
  const auto& in = entry.center_line.points();
  const auto& out = exit.center_line.points();
  const Point2 p0 = in.back();
  const Point2 p3 = out.front();
  const double reach = distance(p0, p3) / 3.0;
  const Point2 p1 = p0 + direction(entry.heading) * reach;
  const Point2 p2 = p3 - direction(exit.heading) * reach;
  std::vector<Point2> pts;
  pts.reserve(kConnectorSamples + 3);
  pts.push_back(in.front());
  for (int k = 0; k <= kConnectorSamples; ++k) {
    pts.push_back(cubic_bezier(p0, p1, p2, p3, static_cast<double>(k) / kConnectorSamples));
  }
  pts.push_back(out.back());
  return Polyline::from_points_dedup(std::move(pts));
}

}  // namespace

std::vector<GroundTruthLane> ground_truth_lanes(const Intersection& I, double stub_length) {
  const int n = static_cast<int>(I.arms.size());
  std::vector<Connection> connections;
  for (int a = 0; a < n; ++a) {
    const Arm& arm = I.arms[static_cast<std::size_t>(a)];
    const int E = arm.entries;
    if (E == 0) continue;
    const double heading_in = driving_heading(arm, Direction::Entry);
    std::vector<std::pair<double, int>> targets;
    for (int b = 0; b < n; ++b) {
      if (b == a || I.arms[static_cast<std::size_t>(b)].exits == 0) continue;
      targets.emplace_back(angle_diff(I.arms[static_cast<std::size_t>(b)].alpha, heading_in), b);
    }
    std::sort(targets.begin(), targets.end());
    const int K = static_cast<int>(targets.size());
    if (K == 0) continue;
    auto add = [&](int rank, int target) {
      connections.push_back({a, E - 1 - rank, targets[static_cast<std::size_t>(target)].second,
                             targets[static_cast<std::size_t>(target)].first, rank});
    };
    if (E >= K) {
      for (int j = 0; j < E; ++j) add(j, j * K / E);
    } else {
      for (int i = 0; i < K; ++i) add(i * E / K, i);
    }
  }

  std::vector<GroundTruthLane> lanes;
  for (int b = 0; b < n; ++b) {
    std::vector<const Connection*> incoming;
    for (const auto& c : connections) {
      if (c.exit_arm == b) incoming.push_back(&c);
    }
    if (incoming.empty()) continue;
    std::stable_sort(incoming.begin(), incoming.end(), [](const Connection* x, const Connection* y) {
      if (x->turn != y->turn) return x->turn < y->turn;
      return x->entry_rank < y->entry_rank;
    });
    const int O = I.arms[static_cast<std::size_t>(b)].exits;
    const int M = static_cast<int>(incoming.size());
    std::vector<std::pair<const Connection*, int>> assigned;  // (connection, exit rank)
    if (M >= O) {
      for (int m = 0; m < M; ++m) assigned.emplace_back(incoming[static_cast<std::size_t>(m)], m * O / M);
    } else {
      for (int q = 0; q < O; ++q) assigned.emplace_back(incoming[static_cast<std::size_t>(q * M / O)], q);
    }
    for (const auto& [c, rank] : assigned) {
      const StubId entry{c->entry_arm, Direction::Entry, c->entry_slot};
      const StubId exit{b, Direction::Exit, O - 1 - rank};
      lanes.push_back({connect(make_stub(I, entry, stub_length), make_stub(I, exit, stub_length)), entry, exit});
    }
  }
  std::stable_sort(lanes.begin(), lanes.end(), [](const GroundTruthLane& x, const GroundTruthLane& y) {
    if (x.entry != y.entry) return x.entry < y.entry;
    return x.exit < y.exit;
  });
  return lanes;
}

Scene random_intersection(std::uint64_t seed, const GeneratorConfig& cfg) {
  if (cfg.arms_min < 2 || cfg.arms_max < cfg.arms_min || cfg.arms_max > 8) {
    throw InvalidGeometry("arm count range must lie within [2, 8]");
  }
  if (cfg.lanes_min < 1 || cfg.lanes_max < cfg.lanes_min) throw InvalidGeometry("invalid lanes-per-direction range");
  if (cfg.gap_min < 0.0 || cfg.gap_max < cfg.gap_min) throw InvalidGeometry("invalid gap range");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> arm_count(cfg.arms_min, cfg.arms_max);
  const int n = arm_count(rng);
  const double jitter = cfg.jitter_deg * kPi / 180.0;
  const double min_sep = cfg.min_separation_deg * kPi / 180.0;
  std::uniform_real_distribution<double> base_angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> jitter_draw(-jitter, jitter);

  Intersection I;
  bool placed = false;
  for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
    I.arms.clear();
    const double base = base_angle(rng);
    for (int k = 0; k < n; ++k) {
      Arm arm;
      arm.alpha = base + 2.0 * kPi * k / n + jitter_draw(rng);
      I.arms.push_back(arm);
    }
    I.sort_arms();
    placed = min_arm_separation(I) >= min_sep;
  }
  if (!placed) throw GenerationFailed("could not place arms with the requested separation in 1000 attempts");

  std::uniform_real_distribution<double> gap(cfg.gap_min, cfg.gap_max);
  std::uniform_int_distribution<int> lanes(cfg.lanes_min, cfg.lanes_max);
  for (auto& arm : I.arms) {
    arm.gap = gap(rng);
    arm.entries = lanes(rng);
    arm.exits = lanes(rng);
  }
  std::uniform_real_distribution<double> center(-cfg.center_spread, cfg.center_spread);
  I.center.x = center(rng);
  I.center.y = center(rng);

  return Scene{I, ground_truth_lanes(I, cfg.stub_length)};
}

void SimConfig::validate() const {
  if (trajectories_per_lane_min < 1 || trajectories_per_lane_max < trajectories_per_lane_min) {
    throw InvalidConfig("trajectories per lane: need 1 <= min <= max");
  }
  if (!(sample_spacing > 0.0)) throw InvalidConfig("sample spacing must be positive");
  if (noise_sigma < 0.0 || noise_sigma_heading < 0.0) throw InvalidConfig("noise sigmas must be non-negative");
  if (!(assumed_speed > 0.0)) throw InvalidConfig("assumed speed must be positive");
}

SimulationResult simulate(const std::vector<GroundTruthLane>& lanes, const SimConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> count(cfg.trajectories_per_lane_min, cfg.trajectories_per_lane_max);
  std::normal_distribution<double> unit(0.0, 1.0);

  SimulationResult result;
  int counter = 0;
  for (std::size_t lane = 0; lane < lanes.size(); ++lane) {
    const Polyline& line = lanes[lane].center_line;
    const int k = count(rng);
    for (int m = 0; m < k; ++m) {
      char id[32];
      std::snprintf(id, sizeof id, "v%05d", counter++);
      Trajectory traj{id, {}};
      for (int step = 0;; ++step) {
        const double s = step * cfg.sample_spacing;
        if (s > line.length() + 1e-9) break;
        const Point2 p = line.point_at(s);
        const Point2 tan = line.tangent_at(s);
        Measurement z;
        z.x = p.x + cfg.noise_sigma * unit(rng);
        z.y = p.y + cfg.noise_sigma * unit(rng);
        z.phi = normalize_angle(std::atan2(tan.y, tan.x) + cfg.noise_sigma_heading * unit(rng));
        z.t = s / cfg.assumed_speed;
        z.id = traj.id;
        traj.samples.push_back(std::move(z));
      }
      result.trajectories.push_back(std::move(traj));
      result.lane_of.push_back(lane);
    }
  }
  return result;
}

std::size_t measurement_count(const std::vector<Trajectory>& trajectories) {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += t.samples.size();
  return n;
}

}  // namespace lanecast
