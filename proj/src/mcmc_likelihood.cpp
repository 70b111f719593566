#include <algorithm>
#include <cmath>

#include "lanecast/error.hpp"
#include "lanecast/mcmc.hpp"

namespace lanecast {

void LikelihoodParams::validate() const {
  if (!(sigma_pos > 0.0) || !(sigma_ang > 0.0)) throw InvalidConfig("likelihood sigmas must be positive");
  if (!(outlier_mahalanobis > 0.0)) throw InvalidConfig("outlier threshold must be positive");
  if (candidate_arms < 1) throw InvalidConfig("candidate_arms must be >= 1");
}

TrajectoryData::TrajectoryData(const std::vector<Trajectory>& trajectories) {
  const std::size_t n = measurement_count(trajectories);
  x_.reserve(n);
  y_.reserve(n);
  phi_.reserve(n);
  begin_.reserve(trajectories.size() + 1);
  begin_.push_back(0);
  for (const auto& t : trajectories) {
    for (const auto& m : t.samples) {
      x_.push_back(m.x);
      y_.push_back(m.y);
      phi_.push_back(normalize_angle(m.phi));
    }
    begin_.push_back(x_.size());
  }
}

Point2 TrajectoryData::centroid() const {
  Point2 c;
  if (x_.empty()) return c;
  for (std::size_t i = 0; i < x_.size(); ++i) c += Point2{x_[i], y_[i]};
  return c * (1.0 / static_cast<double>(x_.size()));
}

std::size_t split_index(const TrajectoryData& data, std::size_t trajectory, const Point2& center) {
  std::size_t best = data.begin(trajectory);
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = data.begin(trajectory); i < data.end(trajectory); ++i) {
    const double dx = data.x(i) - center.x;
    const double dy = data.y(i) - center.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

double log_uniform_multinomial(std::span<const int> counts) {
  if (counts.empty()) return 0.0;
  double n = 0.0;
  double sum_lgamma = 0.0;
  for (int k : counts) {
    n += k;
    sum_lgamma += std::lgamma(k + 1.0);
  }
  if (n == 0.0) return 0.0;
  return std::lgamma(n + 1.0) - sum_lgamma - n * std::log(static_cast<double>(counts.size()));
}

namespace {

constexpr int kMaxSlots = 16;

// Per-arm quantities of the current hypothesis.
struct ArmGeometry {
  Point2 axis;
  Point2 normal;
  double alpha = 0.0;
  double heading[2] = {0.0, 0.0};
  int slots[2] = {0, 0};
  int first_stub[2] = {0, 0};  // flat index of slot 0 among stubs of that direction
  double offsets[2][kMaxSlots] = {};
};

inline double wrap(double a) {
  if (a >= kPi) return a - 2.0 * kPi;
  if (a < -kPi) return a + 2.0 * kPi;
  return a;
}

}  // namespace

LikelihoodBreakdown evaluate_likelihood(const Intersection& I, const TrajectoryData& data,
                                        const LikelihoodParams& params) {
  LikelihoodBreakdown out;
  out.assignments.resize(data.trajectory_count());

  const std::size_t n_arms = I.arms.size();
  std::vector<ArmGeometry> arms(n_arms);
  int stub_total[2] = {0, 0};
  for (std::size_t a = 0; a < n_arms; ++a) {
    const Arm& arm = I.arms[a];
    auto& g = arms[a];
    g.axis = arm_axis(arm);
    g.normal = arm_normal(arm);
    g.alpha = arm.alpha;
    for (int d = 0; d < 2; ++d) {
      const auto dir = static_cast<Direction>(d);
      g.heading[d] = driving_heading(arm, dir);
      g.slots[d] = std::min(arm.lanes(dir), kMaxSlots);
      g.first_stub[d] = stub_total[d];
      stub_total[d] += arm.lanes(dir);
      for (int s = 0; s < g.slots[d]; ++s) g.offsets[d][s] = lateral_offset(arm, dir, s, I.lane_width);
    }
  }
  std::vector<int> counts[2] = {std::vector<int>(static_cast<std::size_t>(stub_total[0]), 0),
                                std::vector<int>(static_cast<std::size_t>(stub_total[1]), 0)};

  const double inv_var_pos = 1.0 / (params.sigma_pos * params.sigma_pos);
  const double inv_var_ang = 1.0 / (params.sigma_ang * params.sigma_ang);
  const double floor_term = std::isfinite(params.outlier_mahalanobis)
                                ? -0.5 * params.outlier_mahalanobis * params.outlier_mahalanobis
                                : kNegInf;
  const double log_norm = -std::log(2.0 * kPi * params.sigma_pos * params.sigma_ang);
  const auto candidates = static_cast<std::size_t>(params.candidate_arms);
  const Point2 c = I.center;

  std::vector<std::pair<double, std::size_t>> by_bearing;
  by_bearing.reserve(n_arms);
  double measurement_term = 0.0;

  for (std::size_t t = 0; t < data.trajectory_count(); ++t) {
    const std::size_t split = split_index(data, t, c);
    for (int d = 0; d < 2; ++d) {
      const std::size_t lo = d == 0 ? data.begin(t) : split + 1;
      const std::size_t hi = d == 0 ? split + 1 : data.end(t);
      if (lo >= hi) continue;
      const std::size_t outer = d == 0 ? lo : hi - 1;
      const double bearing = std::atan2(data.y(outer) - c.y, data.x(outer) - c.x);

      by_bearing.clear();
      for (std::size_t a = 0; a < n_arms; ++a) {
        if (arms[a].slots[d] > 0) by_bearing.emplace_back(std::abs(angle_diff(arms[a].alpha, bearing)), a);
      }
      if (by_bearing.empty()) return out;  // NoStub: -inf
      const std::size_t k = std::min(candidates, by_bearing.size());
      std::partial_sort(by_bearing.begin(), by_bearing.begin() + static_cast<std::ptrdiff_t>(k), by_bearing.end());
      std::sort(by_bearing.begin(), by_bearing.begin() + static_cast<std::ptrdiff_t>(k),
                [](const auto& x, const auto& y) { return x.second < y.second; });

      double best = kNegInf;
      int best_arm = -1;
      int best_slot = -1;
      for (std::size_t ci = 0; ci < k; ++ci) {
        const std::size_t a = by_bearing[ci].second;
        const auto& g = arms[a];
        const int slots = g.slots[d];
        double sums[kMaxSlots] = {};
        for (std::size_t i = lo; i < hi; ++i) {
          const double dx = data.x(i) - c.x;
          const double dy = data.y(i) - c.y;
          const double along = dx * g.axis.x + dy * g.axis.y;
          const double lateral = dx * g.normal.x + dy * g.normal.y;
          const double dev = wrap(data.phi(i) - g.heading[d]);
          const double ang = -0.5 * dev * dev * inv_var_ang;
          for (int s = 0; s < slots; ++s) {
            const double off = lateral - g.offsets[d][s];
            // Stubs are half-lines starting at the center's cross-section.
            const double d2 = along >= 0.0 ? off * off : off * off + along * along;
            sums[s] += std::max(ang - 0.5 * d2 * inv_var_pos, floor_term);
          }
        }
        for (int s = 0; s < slots; ++s) {
          if (sums[s] > best) {
            best = sums[s];
            best_arm = static_cast<int>(a);
            best_slot = s;
          }
        }
      }
      measurement_term += best + static_cast<double>(hi - lo) * log_norm;
      counts[d][static_cast<std::size_t>(arms[static_cast<std::size_t>(best_arm)].first_stub[d] + best_slot)] += 1;
      auto& as = out.assignments[t];
      const StubId id{best_arm, static_cast<Direction>(d), best_slot};
      if (d == 0) {
        as.entry = id;
        as.has_entry = true;
      } else {
        as.exit = id;
        as.has_exit = true;
      }
    }
  }

  out.measurement_term = measurement_term;
  out.multinomial_term =
      params.use_multinomial ? log_uniform_multinomial(counts[0]) + log_uniform_multinomial(counts[1]) : 0.0;
  out.log_likelihood = out.measurement_term + out.multinomial_term;
  return out;
}

double log_likelihood(const Intersection& I, const TrajectoryData& data, const LikelihoodParams& params) {
  return evaluate_likelihood(I, data, params).log_likelihood;
}

double log_likelihood(const Intersection& I, const std::vector<Trajectory>& trajectories,
                      const LikelihoodParams& params) {
  return log_likelihood(I, TrajectoryData(trajectories), params);
}

}  // namespace lanecast
