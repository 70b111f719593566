#include <doctest.h>

#include <random>

#include "lanecast/bspline.hpp"
#include "lanecast/error.hpp"
#include "suites.hpp"

using namespace lanecast;

TEST_CASE("oracle suite") {
  const auto r = testing::bspline_suite(1);
  CHECK(r.partition_error < 1e-12);
  CHECK(r.linear_error < 1e-9);
  CHECK(r.c2_jump < 1e-9);
  CHECK(r.naive_sum_error < 1e-12);
  CHECK(r.design_row_error < 1e-12);
}

TEST_CASE("uniform interior basis values at a knot") {
  // Integer knots with plenty of clamped padding on either side.
  const UniformCubicSpline s(0.0, 17.0, 20);
  const double x = 8.0;
  std::vector<double> nonzero;
  for (int i = 0; i < s.size(); ++i) {
    const double b = s.basis(i, x);
    CHECK(b == doctest::Approx(testing::naive_basis(s.knots(), i, 4, x)).epsilon(1e-14));
    if (b > 1e-15) nonzero.push_back(b);
  }
  REQUIRE(nonzero.size() == 3);
  CHECK(nonzero[0] == doctest::Approx(1.0 / 6));
  CHECK(nonzero[1] == doctest::Approx(2.0 / 3));
  CHECK(nonzero[2] == doctest::Approx(1.0 / 6));
}

TEST_CASE("local support") {
  const UniformCubicSpline s(-3.0, 11.0, 12);
  const auto& t = s.knots();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(s.x_min(), s.x_max());
  for (int n = 0; n < 200; ++n) {
    const double x = u(rng);
    int active = 0;
    for (int i = 0; i < s.size(); ++i) {
      const double b = bspline_basis(t, i, 4, x);
      if (x < t[i] || x >= t[i + 4]) CHECK(b == 0.0);
      if (b != 0.0) ++active;
    }
    CHECK(active <= 4);
  }
}

TEST_CASE("constant and clamped ends") {
  UniformCubicSpline s(2.0, 9.0, std::vector<double>(20, 3.5));
  for (double x = 2.0; x <= 9.0; x += 0.01) CHECK(s.eval(x) == doctest::Approx(3.5).epsilon(1e-14));
  const auto row = s.design_row(2.0);
  double sum = 0;
  for (int j = 0; j < 4; ++j) {
    sum += row.weight[j];
    if (row.index[j] == 0) CHECK(row.weight[j] == doctest::Approx(1.0));
    else CHECK(row.weight[j] == doctest::Approx(0.0));
  }
  CHECK(sum == doctest::Approx(1.0));
  const auto end = s.design_row(9.0);
  for (int j = 0; j < 4; ++j)
    if (end.index[j] == 19) CHECK(end.weight[j] == doctest::Approx(1.0));
}

TEST_CASE("straight line has no curvature") {
  std::vector<double> c(20);
  UniformCubicSpline s(-5.0, 5.0, 20);
  for (int i = 0; i < 20; ++i) s.control_points()[static_cast<std::size_t>(i)] = 0.3 * s.greville(i) - 1.0;
  for (double x = -5.0; x <= 5.0; x += 0.05) {
    CHECK(std::abs(s.derivative(x, 2)) < 1e-9);
    CHECK(s.derivative(x, 1) == doctest::Approx(0.3));
  }
  CHECK(s.smoothness_check() < 1e-9);
}

TEST_CASE("derivatives match finite differences") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  UniformCubicSpline s(0.0, 40.0, 20);
  for (auto& c : s.control_points()) c = u(rng);
  for (double x = 1.0; x < 39.0; x += 0.7) {
    const double h = 1e-5;
    CHECK(s.derivative(x, 1) == doctest::Approx((s.eval(x + h) - s.eval(x - h)) / (2 * h)).epsilon(1e-6));
    CHECK(s.derivative(x, 2) ==
          doctest::Approx((s.derivative(x + h, 1) - s.derivative(x - h, 1)) / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("domain errors") {
  const UniformCubicSpline s(0.0, 1.0, 4);
  CHECK_THROWS_AS(s.eval(1.0 + 1e-9), OutOfDomain);
  CHECK_THROWS_AS(s.eval(-1e-9), OutOfDomain);
  CHECK_THROWS_AS(s.design_row(2.0), OutOfDomain);
  CHECK_THROWS_AS(UniformCubicSpline(0.0, 1.0, 3), InvalidGeometry);
  CHECK_THROWS_AS(UniformCubicSpline(1.0, 1.0, 20), InvalidGeometry);
}
