#include <algorithm>
#include <cmath>

#include "lanecast/error.hpp"
#include "lanecast/mcmc.hpp"

namespace lanecast {

bool accept_with(double u, double log_post, double log_post_new, double log_forward, double log_reverse,
                 double temperature) {
  if (log_forward == kNegInf || log_post_new == kNegInf) return false;
  const double log_ratio = ((log_post_new + log_reverse) - (log_post + log_forward)) / temperature;
  return std::log(u) <= log_ratio;
}

bool accept(double log_post, double log_post_new, double log_forward, double log_reverse, double temperature,
            Rng& rng) {
  // 1 - U[0,1) lies in (0,1].
  const double u = 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return accept_with(u, log_post, log_post_new, log_forward, log_reverse, temperature);
}

double AnnealingSchedule::temperature(int step, int budget) const {
  if (budget <= 1) return t_start;
  const double frac = static_cast<double>(step) / static_cast<double>(budget - 1);
  return std::max(t_end, t_start * std::pow(t_end / t_start, frac));
}

Intersection initial_model(const TrajectoryData& data, const ProposalKernel& kernel) {
  Intersection I;
  I.center = data.centroid();

  std::vector<double> bearings;
  bearings.reserve(data.size());
  double far = -1.0;
  double seed_bearing = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Point2 d = data.position(i) - I.center;
    const double r = norm(d);
    if (r < 1e-9) continue;
    const double b = std::atan2(d.y, d.x);
    bearings.push_back(b);
    if (r > far) {
      far = r;
      seed_bearing = b;
    }
  }

  // Circular k-means, k = 2, seeded with the farthest sample and the bearing
  // most opposed to it.
  double centers[2] = {seed_bearing, normalize_angle(seed_bearing + kPi)};
  if (!bearings.empty()) {
    double worst = -1.0;
    for (double b : bearings) {
      const double d = std::abs(angle_diff(b, seed_bearing));
      if (d > worst) {
        worst = d;
        centers[1] = b;
      }
    }
    for (int iter = 0; iter < 50; ++iter) {
      double sx[2] = {0.0, 0.0};
      double sy[2] = {0.0, 0.0};
      for (double b : bearings) {
        const int k = std::abs(angle_diff(b, centers[0])) <= std::abs(angle_diff(b, centers[1])) ? 0 : 1;
        sx[k] += std::cos(b);
        sy[k] += std::sin(b);
      }
      bool moved = false;
      for (int k = 0; k < 2; ++k) {
        if (std::hypot(sx[k], sy[k]) < 1e-9) continue;
        const double updated = std::atan2(sy[k], sx[k]);
        moved = moved || std::abs(angle_diff(updated, centers[k])) > 1e-12;
        centers[k] = updated;
      }
      if (!moved) break;
    }
  }
  if (std::abs(angle_diff(centers[0], centers[1])) < kernel.limits.min_separation) {
    centers[1] = normalize_angle(centers[0] + kPi);
  }
  for (double a : centers) I.arms.push_back(Arm{a, kernel.new_arm_gap, 1, 1});
  I.sort_arms();
  return I;
}

ChainResult run_chain(const TrajectoryData& data, const Intersection& initial, const ChainConfig& cfg,
                      const StepObserver& observer) {
  if (cfg.budget < 1) throw InvalidConfig("sample budget must be >= 1");
  cfg.kernel.validate();
  cfg.likelihood.validate();
  if (!(cfg.schedule.t_end > 0.0) || !(cfg.schedule.t_start >= cfg.schedule.t_end))
    throw InvalidConfig("temperatures need t_start >= t_end > 0");

  Rng rng(cfg.seed);
  ChainResult result;
  result.initial = initial;
  Intersection current = initial;
  // Uninformative prior: the log posterior equals the log likelihood on valid models.
  double current_lp = log_likelihood(current, data, cfg.likelihood);
  if (current_lp == kNegInf) throw NoStub();
  result.best = current;
  result.best_log_posterior = current_lp;
  result.trace.reserve(static_cast<std::size_t>(cfg.budget));
  result.map_trace.reserve(static_cast<std::size_t>(cfg.budget));

  for (int step = 0; step < cfg.budget; ++step) {
    const double temperature = cfg.schedule.temperature(step, cfg.budget);
    Proposal proposal = propose(current, cfg.kernel, rng);
    auto& stats = result.stats[static_cast<std::size_t>(proposal.move)];
    ++stats.proposed;
    bool accepted = false;
    if (proposal.log_forward != kNegInf) {
      const double lp = log_likelihood(proposal.state, data, cfg.likelihood);
      accepted = accept(current_lp, lp, proposal.log_forward, proposal.log_reverse, temperature, rng);
      if (accepted) {
        current = std::move(proposal.state);
        current_lp = lp;
        ++stats.accepted;
        if (current_lp > result.best_log_posterior) {
          result.best = current;
          result.best_log_posterior = current_lp;
        }
      }
    }
    result.trace.push_back(current_lp);
    result.map_trace.push_back(result.best_log_posterior);
    if (observer) observer(StepRecord{step, proposal.move, accepted, current_lp, temperature}, current);
  }
  return result;
}

ChainResult run_chain(const std::vector<Trajectory>& trajectories, const ChainConfig& cfg,
                      const StepObserver& observer) {
  const TrajectoryData data(trajectories);
  return run_chain(data, initial_model(data, cfg.kernel), cfg, observer);
}

}  // namespace lanecast
