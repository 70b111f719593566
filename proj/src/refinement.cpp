#include "lanecast/refinement.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "lanecast/error.hpp"

namespace lanecast {

void RefinementConfig::validate(double lane_width) const {
  if (control_points < kSplineOrder) throw InvalidConfig("control_points must be >= 4");
  if (stage1_iterations < 0 || total_iterations < 1) throw InvalidConfig("iteration counts must be positive");
  if (stage1_iterations >= total_iterations) throw InvalidConfig("stage1_iterations must be < total_iterations");
  if (!(delta > lane_width)) throw InvalidConfig("delta must exceed the lane width");
  if (e2_samples_per_lane < 1) throw InvalidConfig("e2_samples_per_lane must be >= 1");
  if (!(initial_damping > 0.0) || !(max_damping > initial_damping)) throw InvalidConfig("bad damping range");
  if (!(tolerance >= 0.0) || !(e2_weight >= 0.0)) throw InvalidConfig("tolerance and e2_weight must be >= 0");
  if (!(stub_length > 0.0) || !(stub_extension >= 0.0)) throw InvalidConfig("bad stub length");
}

const char* to_string(NeighborRelation r) {
  switch (r) {
    case NeighborRelation::SharedEntry: return "shared_entry";
    case NeighborRelation::SharedExit: return "shared_exit";
    case NeighborRelation::Adjacent: return "adjacent";
  }
  return "unknown";
}

std::vector<TrajectoryAssociation> associate(const std::vector<Trajectory>& trajectories, const Intersection& I,
                                             double stub_length) {
  const auto all = stubs(I, stub_length);
  std::vector<TrajectoryAssociation> out;
  out.reserve(trajectories.size());
  for (const auto& t : trajectories) {
    if (t.samples.empty()) throw UnassignableTrajectory(t.id);
    std::size_t split = 0;
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
      const double d = distance(t.samples[i].position(), I.center);
      if (d < closest) {
        closest = d;
        split = i;
      }
    }
    if (closest > 3.0 * stub_length) throw UnassignableTrajectory(t.id);

    TrajectoryAssociation a;
    a.split = split;
    for (int d = 0; d < 2; ++d) {
      const auto dir = static_cast<Direction>(d);
      const std::size_t lo = dir == Direction::Entry ? 0 : split;
      const std::size_t hi = dir == Direction::Entry ? split + 1 : t.samples.size();
      double best = std::numeric_limits<double>::infinity();
      const LaneStub* best_stub = nullptr;
      for (const auto& s : all) {
        if (s.direction() != dir) continue;
        const Point2& p0 = s.center_line.points().front();
        const Point2& p1 = s.center_line.points().back();
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) sum += project_on_segment(t.samples[i].position(), p0, p1).distance;
        const double mean = sum / static_cast<double>(hi - lo);
        if (mean < best) {
          best = mean;
          best_stub = &s;
        }
      }
      if (best_stub == nullptr) throw NoStub();
      if (dir == Direction::Entry) {
        a.entry = best_stub->id;
        a.entry_distance = best;
      } else {
        a.exit = best_stub->id;
        a.exit_distance = best;
      }
    }
    out.push_back(a);
  }
  return out;
}

Polyline Lane::center_line(double spacing) const {
  std::vector<Point2> pts;
  double x = spline.x_min();
  while (true) {
    pts.push_back(point_at(x));
    if (x >= spline.x_max()) break;
    const double slope = spline.derivative(x, 1);
    x = std::min(spline.x_max(), x + spacing / std::sqrt(1.0 + slope * slope));
  }
  return Polyline::from_points_dedup(std::move(pts));
}

Polyline initial_polyline(const Intersection& I, const StubId& entry, const StubId& exit, const RefinementConfig& cfg) {
  const LaneStub in = make_stub(I, entry, cfg.stub_length);
  const LaneStub out = make_stub(I, exit, cfg.stub_length);
  const Point2 in_dir = direction(in.heading);
  const Point2 out_dir = direction(out.heading);
  std::vector<Point2> pts{in.center_line.points().front() - in_dir * cfg.stub_extension,
                          in.center_line.points().back(), out.center_line.points().front(),
                          out.center_line.points().back() + out_dir * cfg.stub_extension};
  return Polyline::from_points_dedup(std::move(pts));
}

namespace {

// Least-squares control points for samples (x, y) with a faint curvature
// penalty that keeps unsupported control points well defined.
std::vector<double> fit_control_points(double x_min, double x_max, int n, const std::vector<Point2>& samples) {
  UniformCubicSpline s(x_min, x_max, n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (const auto& p : samples) {
    const DesignRow row = s.design_row(p.x);
    for (int i = 0; i < 4; ++i) {
      b(row.index[i]) += row.weight[i] * p.y;
      for (int j = 0; j < 4; ++j) A(row.index[i], row.index[j]) += row.weight[i] * row.weight[j];
    }
  }
  const double reg = 1e-6;
  for (int i = 0; i + 2 < n; ++i) {
    const int idx[3] = {i, i + 1, i + 2};
    const double c[3] = {1.0, -2.0, 1.0};
    for (int u = 0; u < 3; ++u)
      for (int v = 0; v < 3; ++v) A(idx[u], idx[v]) += reg * c[u] * c[v];
  }
  A.diagonal().array() += 1e-12;
  const Eigen::VectorXd c = A.ldlt().solve(b);
  return {c.data(), c.data() + n};
}

}  // namespace

std::vector<Lane> initialize_lanes(const std::vector<TrajectoryAssociation>& associations,
                                   const std::vector<Trajectory>& trajectories, const Intersection& I,
                                   const RefinementConfig& cfg) {
  if (associations.size() != trajectories.size()) throw InvalidConfig("association count mismatch");
  std::map<std::pair<StubId, StubId>, std::vector<std::size_t>> groups;
  for (std::size_t t = 0; t < associations.size(); ++t) {
    groups[{associations[t].entry, associations[t].exit}].push_back(t);
  }

  std::vector<Lane> lanes;
  lanes.reserve(groups.size());
  for (const auto& [key, members] : groups) {
    Lane lane;
    lane.entry = key.first;
    lane.exit = key.second;
    lane.assigned = members;

    std::vector<double> headings;
    for (std::size_t t : members) {
      for (const auto& m : trajectories[t].samples) headings.push_back(m.phi);
    }
    lane.frame.origin = I.center;
    try {
      lane.frame.rotation = mean_heading(headings);
    } catch (const DegenerateHeadings&) {
      lane.frame.rotation = make_stub(I, lane.entry, cfg.stub_length).heading;
    }

    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -x_min;
    std::vector<Point2> data;
    for (std::size_t t : members) {
      for (const auto& m : trajectories[t].samples) {
        const Point2 q = to_frame(m.position(), lane.frame);
        x_min = std::min(x_min, q.x);
        x_max = std::max(x_max, q.x);
        data.push_back(q);
      }
    }
    if (x_max - x_min < 1.0) {
      const double mid = 0.5 * (x_min + x_max);
      x_min = mid - 0.5;
      x_max = mid + 0.5;
    }

    std::vector<Point2> guide;
    const Polyline poly = initial_polyline(I, lane.entry, lane.exit, cfg).resampled(0.25);
    for (const auto& p : poly.points()) {
      const Point2 q = to_frame(p, lane.frame);
      if (q.x >= x_min && q.x <= x_max) guide.push_back(q);
    }
    if (guide.size() < 4) guide = data;
    lane.spline = UniformCubicSpline(x_min, x_max, fit_control_points(x_min, x_max, cfg.control_points, guide));
    lanes.push_back(std::move(lane));
  }
  return lanes;
}

std::vector<NeighborPair> neighbor_pairs(const std::vector<Lane>& lanes) {
  const auto adjacent = [](const StubId& a, const StubId& b) {
    return a.arm == b.arm && a.direction == b.direction && std::abs(a.slot - b.slot) == 1;
  };
  std::vector<NeighborPair> out;
  for (std::size_t a = 0; a < lanes.size(); ++a) {
    for (std::size_t b = a + 1; b < lanes.size(); ++b) {
      const Lane& A = lanes[a];
      const Lane& B = lanes[b];
      if (A.entry == B.entry) {
        out.push_back({a, b, NeighborRelation::SharedEntry});
      } else if (A.exit == B.exit) {
        out.push_back({a, b, NeighborRelation::SharedExit});
      } else if (adjacent(A.entry, B.entry) || adjacent(A.exit, B.exit)) {
        out.push_back({a, b, NeighborRelation::Adjacent});
      }
    }
  }
  return out;
}

ResidualE1 residual_e1(const Lane& lane, const Point2& p) {
  const Point2 q = to_frame(p, lane.frame);
  const DesignRow row = lane.spline.design_row(q.x);
  ResidualE1 r;
  r.residual = q.y - row.dot(lane.spline.control_points());
  r.jacobian = row;
  for (auto& w : r.jacobian.weight) w = -w;
  return r;
}

ResidualE2 residual_e2(const Lane& a, const Lane& b, double x_a, double lane_width, double delta) {
  const auto& fa = a.spline;
  const auto& fb = b.spline;
  const DesignRow va = fa.design_row(x_a, 0);
  const DesignRow da = fa.design_row(x_a, 1);
  const double ya = va.dot(fa.control_points());
  const double slope_a = da.dot(fa.control_points());

  const Point2 pb = to_frame(from_frame({x_a, ya}, a.frame), b.frame);
  if (!fb.in_domain(pb.x)) throw OutOfDomain(pb.x);
  const DesignRow vb = fb.design_row(pb.x, 0);
  const DesignRow db = fb.design_row(pb.x, 1);
  const double slope_b = db.dot(fb.control_points());

  const double rel = a.frame.rotation - b.frame.rotation;
  const double c = std::cos(rel);
  const double s = std::sin(rel);
  const double S = std::sqrt(1.0 + slope_a * slope_a);
  // Unit normal of a, left of its tangent (1, f'), seen from b's frame.
  const double ny = s * (-slope_a / S) + c * (1.0 / S);
  const double v = pb.y - vb.dot(fb.control_points());
  const double d = ny * v;
  const double m = std::abs(d);

  ResidualE2 out;
  out.d_perp = d;
  out.jacobian_a = va;
  out.jacobian_b = vb;
  if (m >= delta) {
    out.gated = true;
    out.residual = delta * (delta - lane_width);
    out.jacobian_a.weight.fill(0.0);
    out.jacobian_b.weight.fill(0.0);
    return out;
  }
  out.residual = m * (m - lane_width);
  const double dr_dd = (d >= 0.0 ? 1.0 : -1.0) * (2.0 * m - lane_width);
  const double dny_dslope = (-s - c * slope_a) / (S * S * S);
  for (std::size_t j = 0; j < 4; ++j) {
    const double dv = va.weight[j] * (c + s * slope_b);
    const double dny = dny_dslope * da.weight[j];
    out.jacobian_a.weight[j] = dr_dd * (dny * v + ny * dv);
    out.jacobian_b.weight[j] = dr_dd * (-ny * vb.weight[j]);
  }
  return out;
}

std::vector<double> e2_sample_positions(const Lane& lane, int count) {
  const auto& f = lane.spline;
  constexpr int kDense = 1000;
  std::vector<double> xs(kDense + 1);
  std::vector<double> arc(kDense + 1, 0.0);
  const double step = (f.x_max() - f.x_min()) / kDense;
  double prev_y = f.eval(f.x_min());
  xs[0] = f.x_min();
  for (int i = 1; i <= kDense; ++i) {
    xs[i] = i == kDense ? f.x_max() : f.x_min() + i * step;
    const double y = f.eval(xs[i]);
    arc[i] = arc[i - 1] + std::hypot(xs[i] - xs[i - 1], y - prev_y);
    prev_y = y;
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  std::size_t k = 1;
  for (int j = 0; j < count; ++j) {
    const double target = (j + 0.5) / count * arc.back();
    while (k < arc.size() - 1 && arc[k] < target) ++k;
    const double span = arc[k] - arc[k - 1];
    const double t = span > 0.0 ? (target - arc[k - 1]) / span : 0.0;
    out.push_back(xs[k - 1] + t * (xs[k] - xs[k - 1]));
  }
  return out;
}

std::vector<E2Sample> e2_samples(const std::vector<Lane>& lanes, const std::vector<NeighborPair>& pairs,
                                 int samples_per_lane) {
  std::vector<std::vector<double>> positions(lanes.size());
  const auto positions_of = [&](std::size_t l) -> const std::vector<double>& {
    if (positions[l].empty()) positions[l] = e2_sample_positions(lanes[l], samples_per_lane);
    return positions[l];
  };
  std::vector<E2Sample> out;
  for (const auto& p : pairs) {
    for (double x : positions_of(p.a)) out.push_back({p.a, p.b, x});
    for (double x : positions_of(p.b)) out.push_back({p.b, p.a, x});
  }
  return out;
}

namespace {

struct E1Row {
  std::size_t lane;
  DesignRow row;
  double y;
};

class Problem {
 public:
  Problem(std::vector<Lane>& lanes, const std::vector<Trajectory>& trajectories, double lane_width, double delta,
          double e2_weight)
      : lanes_(lanes), lane_width_(lane_width), delta_(delta), e2_weight_(e2_weight) {
    offset_.resize(lanes.size() + 1, 0);
    for (std::size_t l = 0; l < lanes.size(); ++l) offset_[l + 1] = offset_[l] + lanes[l].spline.size();
    for (std::size_t l = 0; l < lanes.size(); ++l) {
      for (std::size_t t : lanes[l].assigned) {
        for (const auto& m : trajectories[t].samples) {
          const Point2 q = to_frame(m.position(), lanes[l].frame);
          if (!lanes[l].spline.in_domain(q.x)) {
            ++skipped_;
            continue;
          }
          rows_.push_back({l, lanes[l].spline.design_row(q.x), q.y});
        }
      }
    }
    // The e1 part of J^T J does not depend on the control points.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(rows_.size() * 16);
    for (const auto& r : rows_) {
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          trip.emplace_back(col(r.lane, r.row.index[i]), col(r.lane, r.row.index[j]), r.row.weight[i] * r.row.weight[j]);
    }
    h_e1_.resize(parameters(), parameters());
    h_e1_.setFromTriplets(trip.begin(), trip.end());
  }

  int parameters() const { return offset_.back(); }
  std::size_t skipped() const { return skipped_; }
  void set_samples(std::vector<E2Sample> samples) { samples_ = std::move(samples); }

  Eigen::VectorXd get() const {
    Eigen::VectorXd x(parameters());
    for (std::size_t l = 0; l < lanes_.size(); ++l) {
      const auto cp = lanes_[l].spline.control_points();
      for (std::size_t i = 0; i < cp.size(); ++i) x(col(l, static_cast<int>(i))) = cp[i];
    }
    return x;
  }

  void set(const Eigen::VectorXd& x) {
    for (std::size_t l = 0; l < lanes_.size(); ++l) {
      auto cp = lanes_[l].spline.control_points();
      for (std::size_t i = 0; i < cp.size(); ++i) cp[i] = x(col(l, static_cast<int>(i)));
    }
  }

  double cost() const {
    double c = 0.0;
    for (const auto& r : rows_) {
      const double e = r.y - r.row.dot(lanes_[r.lane].spline.control_points());
      c += e * e;
    }
    for (const auto& s : samples_) {
      try {
        const auto e = residual_e2(lanes_[s.a], lanes_[s.b], s.x, lane_width_, delta_);
        c += e2_weight_ * e2_weight_ * e.residual * e.residual;
      } catch (const OutOfDomain&) {
      }
    }
    return c;
  }

  // Gauss-Newton normal equations H = J^T J, g = J^T r.
  void linearize(Eigen::SparseMatrix<double>& H, Eigen::VectorXd& g) const {
    g = Eigen::VectorXd::Zero(parameters());
    for (const auto& r : rows_) {
      const double e = r.y - r.row.dot(lanes_[r.lane].spline.control_points());
      for (int i = 0; i < 4; ++i) g(col(r.lane, r.row.index[i])) -= r.row.weight[i] * e;
    }
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(samples_.size() * 64);
    for (const auto& s : samples_) {
      ResidualE2 e;
      try {
        e = residual_e2(lanes_[s.a], lanes_[s.b], s.x, lane_width_, delta_);
      } catch (const OutOfDomain&) {
        continue;
      }
      if (e.gated) continue;
      int idx[8];
      double jac[8];
      for (int i = 0; i < 4; ++i) {
        idx[i] = col(s.a, e.jacobian_a.index[i]);
        jac[i] = e2_weight_ * e.jacobian_a.weight[i];
        idx[4 + i] = col(s.b, e.jacobian_b.index[i]);
        jac[4 + i] = e2_weight_ * e.jacobian_b.weight[i];
      }
      const double r = e2_weight_ * e.residual;
      for (int i = 0; i < 8; ++i) {
        g(idx[i]) += jac[i] * r;
        for (int j = 0; j < 8; ++j) trip.emplace_back(idx[i], idx[j], jac[i] * jac[j]);
      }
    }
    Eigen::SparseMatrix<double> h2(parameters(), parameters());
    h2.setFromTriplets(trip.begin(), trip.end());
    H = h_e1_ + h2;
  }

 private:
  int col(std::size_t lane, int i) const { return offset_[lane] + i; }

  std::vector<Lane>& lanes_;
  double lane_width_;
  double delta_;
  double e2_weight_;
  std::vector<int> offset_;
  std::vector<E1Row> rows_;
  std::vector<E2Sample> samples_;
  std::size_t skipped_ = 0;
  Eigen::SparseMatrix<double> h_e1_;
};

}  // namespace

RefinementResult refine(std::vector<Lane> lanes, const std::vector<NeighborPair>& pairs,
                        const std::vector<Trajectory>& trajectories, const RefinementConfig& cfg, double lane_width) {
  cfg.validate(lane_width);
  RefinementResult result;
  Problem problem(lanes, trajectories, lane_width, cfg.delta, cfg.e2_weight);
  result.skipped_points = problem.skipped();
  const int n = problem.parameters();
  double lambda = cfg.initial_damping;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;

  for (int stage = 1; stage <= 2 && !result.diverged; ++stage) {
    const int budget = stage == 1 ? cfg.stage1_iterations : cfg.total_iterations - cfg.stage1_iterations;
    if (stage == 2) problem.set_samples(e2_samples(lanes, pairs, cfg.e2_samples_per_lane));
    double cost = problem.cost();
    result.cost_trace.push_back({result.iterations, stage, cost, lambda});
    if (n == 0) continue;

    for (int it = 0; it < budget; ++it) {
      Eigen::SparseMatrix<double> H;
      Eigen::VectorXd g;
      problem.linearize(H, g);
      const Eigen::VectorXd x = problem.get();
      Eigen::VectorXd diag = H.diagonal();
      const double floor = std::max(1e-12, 1e-9 * diag.maxCoeff());
      for (int i = 0; i < n; ++i) diag(i) = std::max(diag(i), floor);

      bool stepped = false;
      bool converged = false;
      double new_cost = cost;
      while (true) {
        Eigen::SparseMatrix<double> A = H;
        for (int i = 0; i < n; ++i) A.coeffRef(i, i) += lambda * diag(i);
        solver.compute(A);
        Eigen::VectorXd step;
        if (solver.info() == Eigen::Success) step = solver.solve(-g);
        if (solver.info() == Eigen::Success && step.allFinite()) {
          const double predicted = -(2.0 * g.dot(step) + step.dot(H * step));
          problem.set(x + step);
          new_cost = problem.cost();
          if (new_cost <= cost) {
            stepped = true;
            lambda = std::max(lambda / 10.0, 1e-15);
            break;
          }
          problem.set(x);
          if (predicted <= 1e-3 * cfg.tolerance * cost) {
            converged = true;
            break;
          }
        }
        lambda *= 10.0;
        if (lambda > cfg.max_damping) {
          result.diverged = true;
          break;
        }
      }
      if (!stepped) break;
      ++result.iterations;
      result.cost_trace.push_back({result.iterations, stage, new_cost, lambda});
      const double change = (cost - new_cost) / std::max(cost, std::numeric_limits<double>::min());
      cost = new_cost;
      if (converged || change < cfg.tolerance) break;
    }
  }
  result.lanes = std::move(lanes);
  return result;
}

namespace {

struct Piece {
  std::size_t lane;
  std::size_t begin;  // sample range [begin, end]
  std::size_t end;
  std::vector<std::size_t> cover;  // sorted lanes within tolerance, self included
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

}  // namespace

LaneletMap merge_lanelets(const std::vector<Polyline>& lanes, double tolerance) {
  constexpr double kSpacing = 1.0;
  constexpr std::size_t kMinRun = 3;
  LaneletMap map;
  std::vector<Polyline> sampled;
  sampled.reserve(lanes.size());
  for (const auto& l : lanes) sampled.push_back(l.resampled(kSpacing));

  std::vector<Piece> pieces;
  std::vector<std::vector<std::size_t>> lane_pieces(lanes.size());
  for (std::size_t a = 0; a < sampled.size(); ++a) {
    const auto& pts = sampled[a].points();
    std::vector<std::vector<std::size_t>> cover(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t b = 0; b < sampled.size(); ++b) {
        if (b == a || nearest_point_on_polyline(pts[i], sampled[b]).distance < tolerance) cover[i].push_back(b);
      }
    }
    // Runs of equal cover; runs shorter than kMinRun take the preceding cover.
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    bool changed = true;
    while (changed) {
      changed = false;
      runs.clear();
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i == 0 || cover[i] != cover[i - 1]) runs.push_back({i, i});
        runs.back().second = i;
      }
      if (runs.size() < 2) break;
      for (std::size_t r = 0; r < runs.size(); ++r) {
        if (runs[r].second - runs[r].first + 1 >= kMinRun) continue;
        const std::size_t from = r == 0 ? runs[1].first : runs[r - 1].second;
        for (std::size_t i = runs[r].first; i <= runs[r].second; ++i) cover[i] = cover[from];
        changed = true;
        break;
      }
    }
    for (const auto& [lo, hi] : runs) {
      lane_pieces[a].push_back(pieces.size());
      pieces.push_back({a, lo, hi, cover[lo]});
    }
  }

  std::vector<std::size_t> parent(pieces.size());
  std::iota(parent.begin(), parent.end(), 0);
  const auto contains = [](const std::vector<std::size_t>& v, std::size_t x) {
    return std::binary_search(v.begin(), v.end(), x);
  };
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    for (std::size_t q = p + 1; q < pieces.size(); ++q) {
      const Piece& P = pieces[p];
      const Piece& Q = pieces[q];
      if (P.lane == Q.lane || P.cover != Q.cover || !contains(P.cover, Q.lane) || !contains(Q.cover, P.lane)) continue;
      const Point2 mid = sampled[P.lane].points()[(P.begin + P.end) / 2];
      const auto& qpts = sampled[Q.lane].points();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = Q.begin; i <= Q.end; ++i) best = std::min(best, distance(mid, qpts[i]));
      if (best < tolerance + kSpacing) parent[find_root(parent, q)] = find_root(parent, p);
    }
  }

  // Lanelet ids follow the first piece of each group; its geometry is used.
  std::map<std::size_t, int> id_of_root;
  std::vector<int> id_of_piece(pieces.size());
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const std::size_t root = find_root(parent, p);
    auto [it, inserted] = id_of_root.try_emplace(root, static_cast<int>(map.lanelets.size()));
    id_of_piece[p] = it->second;
    if (inserted) {
      const Piece& P = pieces[p];
      const auto& pts = sampled[P.lane].points();
      const std::size_t last = std::min(P.end + 1, pts.size() - 1);
      Lanelet ll;
      ll.id = it->second;
      ll.center_line = Polyline::from_points_dedup(std::vector<Point2>(
          pts.begin() + static_cast<std::ptrdiff_t>(P.begin), pts.begin() + static_cast<std::ptrdiff_t>(last) + 1));
      map.lanelets.push_back(std::move(ll));
    }
    auto& members = map.lanelets[static_cast<std::size_t>(it->second)].lanes;
    if (std::find(members.begin(), members.end(), pieces[p].lane) == members.end()) members.push_back(pieces[p].lane);
  }

  const auto link = [](std::vector<int>& v, int id) {
    if (std::find(v.begin(), v.end(), id) == v.end()) v.push_back(id);
  };
  for (const auto& ids : lane_pieces) {
    for (std::size_t k = 0; k + 1 < ids.size(); ++k) {
      const int from = id_of_piece[ids[k]];
      const int to = id_of_piece[ids[k + 1]];
      if (from == to) continue;
      link(map.lanelets[static_cast<std::size_t>(from)].successors, to);
      link(map.lanelets[static_cast<std::size_t>(to)].predecessors, from);
    }
  }
  for (auto& ll : map.lanelets) {
    std::sort(ll.successors.begin(), ll.successors.end());
    std::sort(ll.predecessors.begin(), ll.predecessors.end());
    std::sort(ll.lanes.begin(), ll.lanes.end());
    if (ll.lanes.size() > 1) {
      std::string msg = "lanelet " + std::to_string(ll.id) + " merges lanes";
      for (std::size_t l : ll.lanes) msg += " " + std::to_string(l);
      map.merge_log.push_back(std::move(msg));
    }
  }
  return map;
}

}  // namespace lanecast
