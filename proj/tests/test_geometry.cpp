#include <doctest.h>

#include <random>

#include "lanecast/error.hpp"
#include "lanecast/geometry.hpp"

using namespace lanecast;

namespace {
void check_point(const Point2& a, const Point2& b, double tol = 1e-12) {
  CHECK(std::abs(a.x - b.x) <= tol);
  CHECK(std::abs(a.y - b.y) <= tol);
}
}  // namespace

TEST_CASE("to_frame on the worked frames") {
  check_point(to_frame({1, 0}, {{0, 0}, 0.0}), {1, 0});
  check_point(to_frame({0, 1}, {{0, 0}, kPi / 2}), {1, 0});
  check_point(to_frame({2, 3}, {{1, 1}, kPi}), {-1, -2});
}

TEST_CASE("from_frame inverts to_frame") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 200; ++i) {
    const Frame2 f{{u(rng), u(rng)}, u(rng)};
    const Point2 p{u(rng), u(rng)};
    check_point(from_frame(to_frame(p, f), f), p, 1e-9);
    const Point2 v{u(rng), u(rng)};
    check_point(vector_from_frame(vector_to_frame(v, f), f), v, 1e-9);
    CHECK(norm(to_frame(p, f) - to_frame(f.origin, f)) == doctest::Approx(distance(p, f.origin)));
  }
}

TEST_CASE("nearest point on a polyline") {
  const Polyline seg({{-1, 0}, {1, 0}});
  auto a = nearest_point_on_polyline({0, 1}, seg);
  check_point(a.point, {0, 0});
  CHECK(a.distance == doctest::Approx(1.0));
  CHECK(a.arc_position == doctest::Approx(1.0));

  auto b = nearest_point_on_polyline({5, 0}, seg);
  check_point(b.point, {1, 0});
  CHECK(b.distance == doctest::Approx(4.0));
  CHECK(b.arc_position == doctest::Approx(2.0));

  // Equidistant to both segments: the smaller arc position wins.
  const Polyline corner({{0, 0}, {1, 0}, {1, 1}});
  auto c = nearest_point_on_polyline({0.5, 0.5}, corner);
  check_point(c.point, {0.5, 0});
  CHECK(c.distance == doctest::Approx(0.5));
  CHECK(c.arc_position == doctest::Approx(0.5));
  CHECK(c.segment == 0);
}

TEST_CASE("nearest point matches dense brute force") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point2> pts;
    for (int i = 0; i < 5; ++i) pts.push_back({u(rng), u(rng)});
    const Polyline line(pts);
    const Point2 p{u(rng), u(rng)};
    double best = 1e300;
    for (double s = 0; s <= line.length(); s += 1e-3) best = std::min(best, distance(p, line.point_at(s)));
    const auto n = nearest_point_on_polyline(p, line);
    CHECK(n.distance <= best + 1e-12);
    CHECK(n.distance >= best - 1e-3);
    CHECK(distance(n.point, line.point_at(n.arc_position)) < 1e-9);
  }
}

TEST_CASE("mean heading") {
  const std::vector<double> a{0.1, -0.1};
  CHECK(std::abs(mean_heading(a)) < 1e-12);
  const std::vector<double> b{kPi - 0.1, -kPi + 0.1};
  CHECK(mean_heading(b) == doctest::Approx(-kPi));
  const std::vector<double> c{0.0, kPi};
  CHECK_THROWS_AS(mean_heading(c), DegenerateHeadings);
  CHECK_THROWS_AS(mean_heading(std::vector<double>{}), DegenerateHeadings);
}

TEST_CASE("angles normalize into [-pi, pi)") {
  CHECK(normalize_angle(kPi) == doctest::Approx(-kPi));
  CHECK(normalize_angle(3 * kPi + 0.5) == doctest::Approx(-kPi + 0.5));
  CHECK(angle_diff(0.1, 2 * kPi - 0.1) == doctest::Approx(0.2));
  for (double a = -20; a < 20; a += 0.37) {
    const double n = normalize_angle(a);
    CHECK(n >= -kPi);
    CHECK(n < kPi);
  }
}

TEST_CASE("polyline validation and resampling") {
  CHECK_THROWS_AS(Polyline({{0, 0}}), InvalidGeometry);
  CHECK_THROWS_AS(Polyline({{0, 0}, {0, 0}}), InvalidGeometry);
  CHECK_THROWS_AS(Polyline({{0, 0}, {std::nan(""), 0}}), InvalidGeometry);
  const Polyline d = Polyline::from_points_dedup({{0, 0}, {0, 0}, {3, 4}});
  CHECK(d.size() == 2);
  CHECK(d.length() == doctest::Approx(5.0));
  const Polyline r = d.resampled(1.0);
  CHECK(r.size() == 6);
  CHECK(r.length() == doctest::Approx(5.0));
  check_point(r.points().back(), {3, 4});
  check_point(d.reversed().points().front(), {3, 4});
}
