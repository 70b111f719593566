#include "lanecast/bspline.hpp"

#include <algorithm>
#include <cmath>

#include "lanecast/error.hpp"

namespace lanecast {

namespace {
constexpr int kDegree = kSplineOrder - 1;
}

double bspline_basis(std::span<const double> knots, int i, int k, double x) {
  const auto t = [&](int j) { return knots[static_cast<std::size_t>(j)]; };
  if (k == 1) {
    if (t(i) <= x && x < t(i + 1)) return 1.0;
    // Close the last non-empty interval at the right end of the knot vector.
    const double end = knots.back();
    if (x == end && t(i + 1) == end && t(i) < t(i + 1)) return 1.0;
    return 0.0;
  }
  double value = 0.0;
  const double left_den = t(i + k - 1) - t(i);
  if (left_den > 0.0) value += (x - t(i)) / left_den * bspline_basis(knots, i, k - 1, x);
  const double right_den = t(i + k) - t(i + 1);
  if (right_den > 0.0) value += (t(i + k) - x) / right_den * bspline_basis(knots, i + 1, k - 1, x);
  return value;
}

double DesignRow::dot(std::span<const double> coefficients) const {
  double s = 0.0;
  for (int j = 0; j < 4; ++j) s += weight[static_cast<std::size_t>(j)] * coefficients[static_cast<std::size_t>(index[static_cast<std::size_t>(j)])];
  return s;
}

UniformCubicSpline::UniformCubicSpline(double x_min, double x_max, std::vector<double> control_points)
    : x_min_(x_min), x_max_(x_max), coefficients_(std::move(control_points)) {
  const int n = size();
  if (n < kSplineOrder) throw InvalidGeometry("cubic spline needs at least four control points");
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw InvalidGeometry("spline domain must be a non-empty finite interval");
  }
  const int spans = n - kDegree;
  h_ = (x_max - x_min) / spans;
  knots_.reserve(static_cast<std::size_t>(n + kSplineOrder));
  for (int j = 0; j < kDegree; ++j) knots_.push_back(x_min);
  for (int j = 0; j <= spans; ++j) knots_.push_back(j == spans ? x_max : x_min + j * h_);
  for (int j = 0; j < kDegree; ++j) knots_.push_back(x_max);
}

UniformCubicSpline::UniformCubicSpline(double x_min, double x_max, int control_point_count)
    : UniformCubicSpline(x_min, x_max, std::vector<double>(static_cast<std::size_t>(control_point_count), 0.0)) {}

double UniformCubicSpline::greville(int i) const {
  const auto k = static_cast<std::size_t>(i);
  return (knots_[k + 1] + knots_[k + 2] + knots_[k + 3]) / 3.0;
}

void UniformCubicSpline::check_domain(double x) const {
  if (!in_domain(x)) throw OutOfDomain(x);
}

int UniformCubicSpline::span_index(double x) const {
  const int spans = size() - kDegree;
  const int s = static_cast<int>(std::floor((x - x_min_) / h_));
  return std::clamp(s, 0, spans - 1);
}

double UniformCubicSpline::basis(int i, double x) const {
  check_domain(x);
  return bspline_basis(knots_, i, kSplineOrder, x);
}

std::array<double, 4> UniformCubicSpline::active_basis(int span, double x, int order) const {
  // Derivatives of the p+1 non-zero basis functions (de Boor / Piegl-Tiller).
  const int knot = span + kDegree;
  const auto t = [&](int j) { return knots_[static_cast<std::size_t>(j)]; };
  double ndu[4][4];
  double left[4];
  double right[4];
  ndu[0][0] = 1.0;
  for (int j = 1; j <= kDegree; ++j) {
    left[j] = x - t(knot + 1 - j);
    right[j] = t(knot + j) - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  std::array<double, 4> out{};
  if (order == 0) {
    for (int j = 0; j <= kDegree; ++j) out[static_cast<std::size_t>(j)] = ndu[j][kDegree];
    return out;
  }
  if (order > kDegree) return out;
  double a[2][4];
  for (int r = 0; r <= kDegree; ++r) {
    int s1 = 0;
    int s2 = 1;
    a[0][0] = 1.0;
    double d = 0.0;
    for (int k = 1; k <= order; ++k) {
      d = 0.0;
      const int rk = r - k;
      const int pk = kDegree - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : kDegree - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      std::swap(s1, s2);
    }
    out[static_cast<std::size_t>(r)] = d;
  }
  double factor = kDegree;
  for (int k = order - 1; k > 0; --k) factor *= (kDegree - (order - k));
  // factor = p! / (p - order)!
  for (auto& v : out) v *= factor;
  return out;
}

DesignRow UniformCubicSpline::design_row(double x, int order) const {
  check_domain(x);
  const int s = span_index(x);
  DesignRow row;
  row.weight = active_basis(s, x, order);
  for (int j = 0; j < 4; ++j) row.index[static_cast<std::size_t>(j)] = s + j;
  return row;
}

DesignRow UniformCubicSpline::design_row(double x) const { return design_row(x, 0); }

double UniformCubicSpline::eval(double x) const { return design_row(x, 0).dot(coefficients_); }

double UniformCubicSpline::derivative(double x, int order) const { return design_row(x, order).dot(coefficients_); }

double UniformCubicSpline::smoothness_check() const {
  const int spans = size() - kDegree;
  double worst = 0.0;
  for (int s = 1; s < spans; ++s) {
    const double knot = knots_[static_cast<std::size_t>(s + kDegree)];
    const auto left = active_basis(s - 1, knot, 2);
    const auto right = active_basis(s, knot, 2);
    double fl = 0.0;
    double fr = 0.0;
    for (int j = 0; j < 4; ++j) {
      fl += left[static_cast<std::size_t>(j)] * coefficients_[static_cast<std::size_t>(s - 1 + j)];
      fr += right[static_cast<std::size_t>(j)] * coefficients_[static_cast<std::size_t>(s + j)];
    }
    worst = std::max(worst, std::abs(fl - fr));
  }
  return worst;
}

}  // namespace lanecast
