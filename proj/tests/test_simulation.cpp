#include <doctest.h>

#include <cmath>
#include <set>

#include "lanecast/error.hpp"
#include "lanecast/evaluation.hpp"
#include "lanecast/simulation.hpp"

using namespace lanecast;

namespace {
Intersection cross() {
  Intersection I;
  for (int k = 0; k < 4; ++k) I.arms.push_back({k * kPi / 2, 0.0, 1, 1});
  I.sort_arms();
  return I;
}

bool same(const Trajectory& a, const Trajectory& b) {
  if (a.id != b.id || a.samples.size() != b.samples.size()) return false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const auto& p = a.samples[i];
    const auto& q = b.samples[i];
    if (p.x != q.x || p.y != q.y || p.phi != q.phi || p.t != q.t) return false;
  }
  return true;
}
}  // namespace

TEST_CASE("one-lane cross has twelve lanes") {
  const auto lanes = ground_truth_lanes(cross());
  CHECK(lanes.size() == 12);
  std::set<std::pair<StubId, StubId>> pairs;
  for (const auto& l : lanes) {
    CHECK(l.entry.arm != l.exit.arm);
    pairs.insert({l.entry, l.exit});
  }
  CHECK(pairs.size() == 12);
}

TEST_CASE("ground truth lanes are smooth and use every stub") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Scene s = random_intersection(seed);
    std::set<StubId> used;
    for (const auto& l : s.lanes) {
      used.insert(l.entry);
      used.insert(l.exit);
      // Heading continuity where the stubs meet the connector.
      const auto& p = l.center_line.points();
      for (std::size_t i : {std::size_t{1}, p.size() - 2}) {
        const Point2 a = p[i] - p[i - 1];
        const Point2 b = p[i + 1] - p[i];
        CHECK(std::abs(std::atan2(cross(a, b), dot(a, b))) < 5.0 * kPi / 180);
      }
    }
    CHECK(used.size() == stubs(s.intersection).size());
  }
}

TEST_CASE("random intersections honor the generator ranges") {
  GeneratorConfig cfg;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Scene s = random_intersection(seed, cfg);
    const auto& I = s.intersection;
    CHECK(is_valid(I));
    CHECK(static_cast<int>(I.arms.size()) >= cfg.arms_min);
    CHECK(static_cast<int>(I.arms.size()) <= cfg.arms_max);
    CHECK(min_arm_separation(I) >= 25.0 * kPi / 180 - 1e-12);
    for (const auto& a : I.arms) {
      CHECK(a.entries >= cfg.lanes_min);
      CHECK(a.entries <= cfg.lanes_max);
      CHECK(a.exits <= cfg.lanes_max);
      CHECK(a.gap >= cfg.gap_min);
      CHECK(a.gap <= cfg.gap_max);
    }
  }
}

TEST_CASE("generation is deterministic") {
  const Scene a = random_intersection(42);
  const Scene b = random_intersection(42);
  CHECK(a.intersection == b.intersection);
  REQUIRE(a.lanes.size() == b.lanes.size());
  for (std::size_t i = 0; i < a.lanes.size(); ++i) CHECK(a.lanes[i].center_line.points() == b.lanes[i].center_line.points());
  SimConfig sim;
  sim.seed = 3;
  const auto x = simulate(a.lanes, sim);
  const auto y = simulate(a.lanes, sim);
  REQUIRE(x.trajectories.size() == y.trajectories.size());
  for (std::size_t i = 0; i < x.trajectories.size(); ++i) CHECK(same(x.trajectories[i], y.trajectories[i]));
  CHECK(x.lane_of == y.lane_of);
}

TEST_CASE("generator rejects bad ranges") {
  GeneratorConfig cfg;
  cfg.arms_min = 6;
  cfg.arms_max = 5;
  CHECK_THROWS_AS(random_intersection(0, cfg), InvalidGeometry);
  cfg = {};
  cfg.arms_min = cfg.arms_max = 8;
  cfg.min_separation_deg = 60;
  CHECK_THROWS_AS(random_intersection(0, cfg), Error);
}

TEST_CASE("trajectory counts and spacing") {
  const auto lanes = ground_truth_lanes(cross());
  SimConfig sim;
  sim.trajectories_per_lane_min = sim.trajectories_per_lane_max = 3;
  const auto r = simulate(lanes, sim);
  CHECK(r.trajectories.size() == 36);
  sim = {};
  const auto d = simulate(lanes, sim);
  std::vector<int> per_lane(lanes.size(), 0);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < d.trajectories.size(); ++i) {
    ++per_lane[d.lane_of[i]];
    ids.insert(d.trajectories[i].id);
    validate(d.trajectories[i]);
  }
  CHECK(ids.size() == d.trajectories.size());
  for (int c : per_lane) {
    CHECK(c >= 3);
    CHECK(c <= 5);
  }
}

TEST_CASE("zero noise puts samples on the center line") {
  const Scene s = random_intersection(8);
  SimConfig sim;
  sim.noise_sigma = 0.0;
  sim.noise_sigma_heading = 0.0;
  const auto r = simulate(s.lanes, sim);
  for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
    const auto& line = s.lanes[r.lane_of[i]].center_line;
    const auto& samples = r.trajectories[i].samples;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      CHECK(nearest_point_on_polyline(samples[k].position(), line).distance < 1e-9);
      if (k > 0) CHECK(distance(samples[k].position(), samples[k - 1].position()) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("lateral noise statistics") {
  GroundTruthLane lane{Polyline({{0, 0}, {25000, 0}}), {}, {}};
  SimConfig sim;
  sim.trajectories_per_lane_min = sim.trajectories_per_lane_max = 4;
  sim.seed = 17;
  const auto r = simulate({lane}, sim);
  double sum = 0, sq = 0;
  std::size_t n = 0;
  for (const auto& t : r.trajectories)
    for (const auto& m : t.samples) {
      sum += m.y;
      sq += m.y * m.y;
      ++n;
    }
  REQUIRE(n >= 100000);
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(sd == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("trajectories are recoverable by nearest lane") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Scene s = random_intersection(seed);
    SimConfig sim;
    sim.noise_sigma = 0.5 * kLaneWidth;
    sim.seed = seed;
    const auto r = simulate(s.lanes, sim);
    int correct = 0;
    for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
      double best = 1e300;
      std::size_t arg = 0;
      for (std::size_t l = 0; l < s.lanes.size(); ++l) {
        double sum = 0;
        for (const auto& m : r.trajectories[i].samples)
          sum += nearest_point_on_polyline(m.position(), s.lanes[l].center_line).distance;
        if (sum < best) {
          best = sum;
          arg = l;
        }
      }
      correct += arg == r.lane_of[i];
    }
    CHECK(correct == static_cast<int>(r.trajectories.size()));
  }
}

TEST_CASE("simulation config validation") {
  SimConfig sim;
  sim.trajectories_per_lane_min = 6;
  CHECK_THROWS_AS(sim.validate(), InvalidConfig);
  sim = {};
  sim.sample_spacing = 0;
  CHECK_THROWS_AS(sim.validate(), InvalidConfig);
  sim = {};
  sim.noise_sigma = -1;
  CHECK_THROWS_AS(sim.validate(), InvalidConfig);
}

TEST_CASE("grouping measurements") {
  std::vector<Measurement> m{{0, 0, 0, 2, "b"}, {1, 0, 0, 1, "a"}, {0, 1, 0, 1, "b"}, {2, 0, 0, 3, "a"}};
  const auto g = group_measurements(m);
  REQUIRE(g.size() == 2);
  CHECK(g[0].id == "b");
  CHECK(g[0].samples[0].t == 1);
  CHECK(g[1].samples.size() == 2);
  Trajectory bad{"x", {{0, 0, 0, 1, "x"}, {1, 0, 0, 1, "x"}}};
  CHECK_THROWS_AS(validate(bad), SchemaError);
}
