#include <doctest.h>

#include <random>

#include "lanecast/error.hpp"
#include "lanecast/intersection.hpp"

using namespace lanecast;

namespace {
Intersection cross(int entries = 1, int exits = 1, double gap = 0.0) {
  Intersection I;
  for (int k = 0; k < 4; ++k) I.arms.push_back({k * kPi / 2, gap, entries, exits});
  I.sort_arms();
  return I;
}
}  // namespace

TEST_CASE("stub offsets of a single arm") {
  Intersection I;
  I.arms = {Arm{0.0, 1.0, 2, 1}};
  const auto s = stubs(I);
  REQUIRE(s.size() == 3);
  CHECK(s[0].id.direction == Direction::Entry);
  CHECK(s[0].lateral_offset == doctest::Approx(-1.85));
  CHECK(s[1].lateral_offset == doctest::Approx(-(0.5 + 1.5 * 2.7)));
  CHECK(s[2].id.direction == Direction::Exit);
  CHECK(s[2].lateral_offset == doctest::Approx(1.85));
  // Entries point toward the center and exits away from it.
  CHECK(std::abs(angle_diff(s[0].heading, kPi)) < 1e-12);
  CHECK(std::abs(s[2].heading) < 1e-12);
  const auto& e = s[0].center_line.points();
  CHECK(norm(e.back()) < norm(e.front()));
  CHECK(s[0].center_line.length() == doctest::Approx(kDefaultStubLength));
}

TEST_CASE("stub count of a symmetric cross") {
  for (int e = 1; e <= 3; ++e)
    for (int o = 1; o <= 3; ++o) CHECK(stubs(cross(e, o)).size() == static_cast<std::size_t>(4 * (e + o)));
}

TEST_CASE("nearest stub on its own center line") {
  const Intersection I = cross(2, 2, 1.0);
  for (const auto& s : stubs(I)) {
    const Point2 p = s.center_line.point_at(s.center_line.length() / 3);
    const auto n = nearest_stub(I, {p, s.heading}, s.id.direction);
    CHECK(n.stub.id == s.id);
    CHECK(n.distance < 1e-9);
    CHECK(n.angular_deviation < 1e-9);
  }
}

TEST_CASE("nearest stub tie goes to the lower slot") {
  Intersection I;
  I.arms = {Arm{0.0, 0.0, 2, 1}};
  // Midway between entry slot 0 (y=+1.35) and slot 1 (y=+4.05).
  const auto n = nearest_stub(I, {{15.0, 2.7}, kPi}, Direction::Entry);
  CHECK(n.stub.id.slot == 0);
  CHECK(n.distance == doctest::Approx(1.35));
}

TEST_CASE("nearest stub matches an exhaustive scan") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-40, 40);
  const Intersection I = cross(2, 1, 0.7);
  const auto all = stubs(I);
  for (int i = 0; i < 500; ++i) {
    const Pose2 pose{{u(rng), u(rng)}, u(rng)};
    for (Direction d : {Direction::Entry, Direction::Exit}) {
      double best = 1e300;
      StubId id;
      for (const auto& s : all) {
        if (s.id.direction != d) continue;
        const double dist = nearest_point_on_polyline(pose.position, s.center_line).distance;
        if (dist < best) {
          best = dist;
          id = s.id;
        }
      }
      const auto n = nearest_stub(I, pose, d);
      CHECK(n.distance == doctest::Approx(best));
      CHECK(n.stub.id == id);
    }
  }
}

TEST_CASE("nearest stub without that direction") {
  Intersection I;
  I.arms = {Arm{0.0, 0.0, 1, 0}};
  CHECK_THROWS_AS(nearest_stub(I, {{5, 5}, 0}, Direction::Exit), NoStub);
}

TEST_CASE("rigid motions move the stubs along") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  Intersection I = cross(2, 1, 1.3);
  I.center = {4, -7};
  for (int i = 0; i < 20; ++i) {
    const double theta = u(rng);
    const Point2 shift{3 * u(rng), 3 * u(rng)};
    const auto a = stubs(I);
    const auto r = stubs(rotated(I, theta));
    const auto t = stubs(translated(I, shift));
    REQUIRE(a.size() == r.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      // Rotation may reorder arms; match by position instead of index.
      const Point2 p = a[k].center_line.points().front() - I.center;
      const Point2 q = I.center + Point2{std::cos(theta) * p.x - std::sin(theta) * p.y,
                                         std::sin(theta) * p.x + std::cos(theta) * p.y};
      double best = 1e300;
      for (const auto& s : r) best = std::min(best, distance(q, s.center_line.points().front()));
      CHECK(best < 1e-9);
      CHECK(distance(t[k].center_line.points().front(), a[k].center_line.points().front() + shift) < 1e-9);
    }
  }
}

TEST_CASE("validity") {
  CHECK(is_valid(cross()));
  Intersection close;
  close.arms = {Arm{0.0, 0, 1, 1}, Arm{20.0 * kPi / 180, 0, 1, 1}};
  CHECK_FALSE(is_valid(close));
  Intersection empty_arm = cross();
  empty_arm.arms[1].entries = 0;
  empty_arm.arms[1].exits = 0;
  CHECK_FALSE(is_valid(empty_arm));
  Intersection wide = cross();
  wide.arms[0].gap = 11.0;
  CHECK_FALSE(is_valid(wide));
  CHECK(min_arm_separation(cross()) == doctest::Approx(kPi / 2));
  CHECK(border_radius(cross()) > 0.0);
}
