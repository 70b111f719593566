#include <algorithm>
#include <cmath>

#include "lanecast/error.hpp"
#include "lanecast/mcmc.hpp"

namespace lanecast {

std::string_view to_string(MoveType m) {
  switch (m) {
    case MoveType::Rotate: return "rotate";
    case MoveType::Shift: return "shift";
    case MoveType::Gap: return "gap";
    case MoveType::AddArm: return "add_arm";
    case MoveType::RemoveArm: return "remove_arm";
    case MoveType::AddLane: return "add_lane";
    case MoveType::RemoveLane: return "remove_lane";
  }
  return "unknown";
}

void ProposalKernel::validate() const {
  const auto& p = probabilities;
  for (double v : {p.rotate, p.shift, p.gap, p.arm, p.lane}) {
    if (!(v >= 0.0)) throw InvalidConfig("move probabilities must be non-negative");
  }
  if (std::abs(p.sum() - 1.0) > 1e-12) throw InvalidConfig("move probabilities must sum to 1");
  if (!(rotate_half_range > 0.0) || !(shift_max_radius > 0.0) || !(gap_half_range > 0.0)) {
    throw InvalidConfig("move ranges must be positive");
  }
}

double add_arm_measure(const Intersection& I, double min_separation) {
  const std::size_t n = I.arms.size();
  if (n == 0) return 2.0 * kPi;
  double measure = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = I.arms[i].alpha;
    const double b = i + 1 < n ? I.arms[i + 1].alpha : I.arms[0].alpha + 2.0 * kPi;
    measure += std::max(0.0, (b - a) - 2.0 * min_separation);
  }
  return measure;
}

namespace {

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t pick(Rng& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

// Draws an angle uniformly from the admissible parts of the gaps between arms.
double sample_new_arm_angle(const Intersection& I, double min_separation, double measure, Rng& rng) {
  double v = uniform01(rng) * measure;
  const std::size_t n = I.arms.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = I.arms[i].alpha;
    const double b = i + 1 < n ? I.arms[i + 1].alpha : I.arms[0].alpha + 2.0 * kPi;
    const double width = std::max(0.0, (b - a) - 2.0 * min_separation);
    if (v < width || i + 1 == n) return normalize_angle(a + min_separation + std::min(v, width));
    v -= width;
  }
  return 0.0;
}

void invalidate(Proposal& p) {
  p.log_forward = kNegInf;
  p.log_reverse = kNegInf;
}

}  // namespace

Proposal propose(const Intersection& I, const ProposalKernel& kernel, Rng& rng) {
  const auto& prob = kernel.probabilities;
  Proposal out{I, 0.0, 0.0, MoveType::Rotate};
  const auto n_arms = I.arms.size();
  if (n_arms == 0) {
    invalidate(out);
    return out;
  }
  const double log_arms = std::log(static_cast<double>(n_arms));
  const double half = std::log(0.5);

  const double omega = uniform01(rng);
  double threshold = prob.rotate;
  if (omega < threshold) {
    out.move = MoveType::Rotate;
    const std::size_t j = pick(rng, n_arms);
    const double delta = (2.0 * uniform01(rng) - 1.0) * kernel.rotate_half_range;
    out.state.arms[j].alpha += delta;
    out.state.sort_arms();
    out.log_forward = std::log(prob.rotate) - log_arms - std::log(2.0 * kernel.rotate_half_range);
    out.log_reverse = out.log_forward;
  } else if (omega < (threshold += prob.shift)) {
    out.move = MoveType::Shift;
    const double r = uniform01(rng) * kernel.shift_max_radius;
    const double phi = uniform01(rng) * 2.0 * kPi;
    out.state.center += direction(phi) * r;
    // Uniform over (r, phi); the reverse move is (r, phi + pi).
    out.log_forward = std::log(prob.shift) - std::log(kernel.shift_max_radius * 2.0 * kPi);
    out.log_reverse = out.log_forward;
  } else if (omega < (threshold += prob.gap)) {
    out.move = MoveType::Gap;
    const std::size_t j = pick(rng, n_arms);
    out.state.arms[j].gap += (2.0 * uniform01(rng) - 1.0) * kernel.gap_half_range;
    out.log_forward = std::log(prob.gap) - log_arms - std::log(2.0 * kernel.gap_half_range);
    out.log_reverse = out.log_forward;
  } else if (omega < (threshold += prob.arm)) {
    const double min_sep = kernel.limits.min_separation;
    if (uniform01(rng) < 0.5) {
      out.move = MoveType::AddArm;
      const double measure = add_arm_measure(I, min_sep);
      if (!(measure > 0.0)) {
        invalidate(out);
        return out;
      }
      Arm arm;
      arm.alpha = sample_new_arm_angle(I, min_sep, measure, rng);
      arm.gap = kernel.new_arm_gap;
      arm.entries = 1;
      arm.exits = 1;
      out.state.arms.push_back(arm);
      out.state.sort_arms();
      out.log_forward = std::log(prob.arm) + half - std::log(measure);
      out.log_reverse = std::log(prob.arm) + half - std::log(static_cast<double>(n_arms + 1));
    } else {
      out.move = MoveType::RemoveArm;
      if (static_cast<int>(n_arms) <= kernel.min_arms) {
        invalidate(out);
        return out;
      }
      const std::size_t j = pick(rng, n_arms);
      out.state.arms.erase(out.state.arms.begin() + static_cast<std::ptrdiff_t>(j));
      out.log_forward = std::log(prob.arm) + half - log_arms;
      out.log_reverse = std::log(prob.arm) + half - std::log(add_arm_measure(out.state, min_sep));
    }
  } else {
    if (uniform01(rng) < 0.5) {
      out.move = MoveType::AddLane;
      const std::size_t j = pick(rng, n_arms);
      // Left of the arm axis (seen from the center) holds the entries.
      const Direction d = uniform01(rng) < 0.5 ? Direction::Entry : Direction::Exit;
      Arm& arm = out.state.arms[j];
      arm.lanes(d) += 1;
      out.log_forward = std::log(prob.lane) + half - log_arms + half;
      out.log_reverse = std::log(prob.lane) + half +
                        std::log(static_cast<double>(arm.lanes(d)) / out.state.lane_count());
    } else {
      out.move = MoveType::RemoveLane;
      const int total = I.lane_count();
      if (total == 0) {
        invalidate(out);
        return out;
      }
      int k = static_cast<int>(pick(rng, static_cast<std::size_t>(total)));
      std::size_t j = 0;
      Direction d = Direction::Entry;
      for (j = 0; j < n_arms; ++j) {
        const Arm& arm = I.arms[j];
        if (k < arm.entries) {
          d = Direction::Entry;
          break;
        }
        k -= arm.entries;
        if (k < arm.exits) {
          d = Direction::Exit;
          break;
        }
        k -= arm.exits;
      }
      const int before = I.arms[j].lanes(d);
      out.state.arms[j].lanes(d) -= 1;
      out.log_forward = std::log(prob.lane) + half + std::log(static_cast<double>(before) / total);
      out.log_reverse = std::log(prob.lane) + half - log_arms + half;
    }
  }

  if (!is_valid(out.state, kernel.limits) || static_cast<int>(out.state.arms.size()) < std::min(kernel.min_arms, static_cast<int>(n_arms))) {
    invalidate(out);
  }
  return out;
}

}  // namespace lanecast
