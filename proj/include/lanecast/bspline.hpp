#pragma once

// Uniform cubic 1D B-spline f: x -> y with clamped end knots.

#include <array>
#include <span>
#include <vector>

namespace lanecast {

inline constexpr int kSplineOrder = 4;
inline constexpr int kDefaultControlPoints = 20;

/// Cox-de Boor recursion for basis N_{i,k}(x) over an arbitrary knot vector.
/// Half-open support [t_i, t_{i+k}); the last non-degenerate interval is closed
/// so that the right domain end is covered.
double bspline_basis(std::span<const double> knots, int i, int k, double x);

/// Sparse design row: the four active basis functions at x.
struct DesignRow {
  std::array<int, 4> index{};
  std::array<double, 4> weight{};

  double dot(std::span<const double> coefficients) const;
};

class UniformCubicSpline {
 public:
  UniformCubicSpline() = default;
  /// Throws InvalidGeometry for fewer than 4 control points or an empty domain.
  UniformCubicSpline(double x_min, double x_max, std::vector<double> control_points);
  /// All control points zero.
  UniformCubicSpline(double x_min, double x_max, int control_point_count = kDefaultControlPoints);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  bool in_domain(double x) const { return x >= x_min_ && x <= x_max_; }
  int size() const { return static_cast<int>(coefficients_.size()); }
  /// Width of one interior knot interval.
  double knot_spacing() const { return h_; }

  std::span<const double> control_points() const { return coefficients_; }
  std::span<double> control_points() { return coefficients_; }
  const std::vector<double>& knots() const { return knots_; }

  /// Greville abscissa of control point i (mean of its three inner knots).
  double greville(int i) const;

  /// N_{i,4}(x) via Cox-de Boor. Throws OutOfDomain.
  double basis(int i, double x) const;

  /// f(x) from the four active bases. Throws OutOfDomain.
  double eval(double x) const;
  /// d^order f / dx^order for order in [0, 3]. Throws OutOfDomain.
  double derivative(double x, int order) const;

  DesignRow design_row(double x) const;
  /// Active basis derivatives of the given order (0..3) at x.
  DesignRow design_row(double x, int order) const;

  /// Index of the first active control point for x (the knot interval).
  int span_index(double x) const;

  /// Largest |f''(t-) - f''(t+)| over the interior knots.
  double smoothness_check() const;

 private:
  // Basis derivatives of the given order in knot interval `span`, evaluated at
  // x; x need not lie inside the interval (used for one-sided limits).
  std::array<double, 4> active_basis(int span, double x, int order) const;
  void check_domain(double x) const;

  double x_min_ = 0.0;
  double x_max_ = 1.0;
  double h_ = 1.0;
  std::vector<double> knots_;
  std::vector<double> coefficients_;
};

}  // namespace lanecast
