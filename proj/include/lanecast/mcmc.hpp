#pragma once

// Reversible-jump Metropolis-Hastings over Intersection hypotheses with an
// annealed acceptance rule. The chain keeps the best state it visits as the
// MAP estimate.

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

#include "lanecast/intersection.hpp"
#include "lanecast/simulation.hpp"

namespace lanecast {

using Rng = std::mt19937_64;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class MoveType { Rotate = 0, Shift, Gap, AddArm, RemoveArm, AddLane, RemoveLane };
inline constexpr int kMoveTypeCount = 7;

std::string_view to_string(MoveType m);

/// Probability mass of each move group. Add/remove splits are 0.5/0.5.
struct MoveProbabilities {
  double rotate = 0.30;
  double shift = 0.22;
  double gap = 0.16;
  double arm = 0.05;
  double lane = 0.27;

  double sum() const { return rotate + shift + gap + arm + lane; }
};

struct ProposalKernel {
  MoveProbabilities probabilities;
  double rotate_half_range = 6.0 * kPi / 180.0;
  double shift_max_radius = 6.0;
  double gap_half_range = 1.8;
  /// Gap of an arm created by the add-arm move; such arms carry 1 entry, 1 exit.
  double new_arm_gap = 0.0;
  int min_arms = 2;
  ValidityLimits limits;

  /// Throws InvalidConfig unless probabilities are non-negative and sum to 1.
  void validate() const;
};

struct Proposal {
  Intersection state;
  double log_forward = 0.0;  // log P(I -> I'), -inf for invalid proposals
  double log_reverse = 0.0;  // log P(I' -> I)
  MoveType move = MoveType::Rotate;
};

/// Modifies exactly one parameter group of I.
Proposal propose(const Intersection& I, const ProposalKernel& kernel, Rng& rng);

/// Angular measure (radians) available to the add-arm move: the parts of the
/// gaps between arms that keep `min_separation` to every existing arm.
double add_arm_measure(const Intersection& I, double min_separation);

struct LikelihoodParams {
  double sigma_pos = 1.5;
  double sigma_ang = 10.0 * kPi / 180.0;
  bool use_multinomial = true;
  /// Optional floor on the per-measurement log density at its maximum minus
  /// k^2/2. Infinity (the default) gives the plain Gaussian.
  double outlier_mahalanobis = std::numeric_limits<double>::infinity();
  /// Arms (nearest in bearing to a trajectory part's outer end) scored per part.
  int candidate_arms = 2;

  void validate() const;
};

/// Measurements flattened into contiguous arrays; built once per dataset.
class TrajectoryData {
 public:
  explicit TrajectoryData(const std::vector<Trajectory>& trajectories);

  std::size_t trajectory_count() const { return begin_.size() - 1; }
  std::size_t size() const { return x_.size(); }
  std::size_t begin(std::size_t t) const { return begin_[t]; }
  std::size_t end(std::size_t t) const { return begin_[t + 1]; }
  double x(std::size_t i) const { return x_[i]; }
  double y(std::size_t i) const { return y_[i]; }
  double phi(std::size_t i) const { return phi_[i]; }
  Point2 position(std::size_t i) const { return {x_[i], y_[i]}; }
  Point2 centroid() const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> phi_;
  std::vector<std::size_t> begin_;
};

/// Index of the sample closest to `center`; the approaching part of a
/// trajectory is [begin, split], the departing part (split, end).
std::size_t split_index(const TrajectoryData& data, std::size_t trajectory, const Point2& center);

struct PartAssignment {
  StubId entry;
  StubId exit;
  bool has_entry = false;
  bool has_exit = false;
};

struct LikelihoodBreakdown {
  double log_likelihood = kNegInf;
  double measurement_term = 0.0;
  double multinomial_term = 0.0;
  std::vector<PartAssignment> assignments;  // one per trajectory
};

/// log P(Z | I). Each trajectory is split at its sample nearest to the center;
/// each part is scored against the single same-direction stub that maximizes
/// its summed Gaussian position + heading log density; a uniform multinomial
/// over per-stub trajectory counts is added. Returns -inf when a part has no
/// stub of its direction.
double log_likelihood(const Intersection& I, const TrajectoryData& data, const LikelihoodParams& params);
double log_likelihood(const Intersection& I, const std::vector<Trajectory>& trajectories,
                      const LikelihoodParams& params);
LikelihoodBreakdown evaluate_likelihood(const Intersection& I, const TrajectoryData& data,
                                        const LikelihoodParams& params);

/// log of the uniform multinomial pmf: log C(N; k_1..k_m) - N log m.
double log_uniform_multinomial(std::span<const int> counts);

/// Annealed Metropolis-Hastings test against a given u in (0, 1].
bool accept_with(double u, double log_post, double log_post_new, double log_forward, double log_reverse,
                 double temperature);
/// Draws u ~ U(0, 1] from rng.
bool accept(double log_post, double log_post_new, double log_forward, double log_reverse, double temperature,
            Rng& rng);

struct AnnealingSchedule {
  double t_start = 150.0;
  double t_end = 1.0;

  /// Geometric decay from t_start (step 0) to t_end (last step).
  double temperature(int step, int budget) const;
};

struct ChainConfig {
  int budget = 5000;
  ProposalKernel kernel;
  LikelihoodParams likelihood;
  AnnealingSchedule schedule;
  std::uint64_t seed = 0;
};

struct MoveStats {
  int proposed = 0;
  int accepted = 0;
};

struct StepRecord {
  int step = 0;
  MoveType move = MoveType::Rotate;
  bool accepted = false;
  double log_posterior = 0.0;  // of the chain state after the step
  double temperature = 1.0;
};

using StepObserver = std::function<void(const StepRecord&, const Intersection&)>;

struct ChainResult {
  Intersection initial;
  Intersection best;
  double best_log_posterior = kNegInf;
  std::array<MoveStats, kMoveTypeCount> stats{};
  std::vector<double> trace;      // log posterior of the current state per step
  std::vector<double> map_trace;  // best log posterior so far per step
};

/// Data-driven start: center at the measurement centroid, two arms at the two
/// circular k-means clusters of measurement bearings, one entry + one exit each.
Intersection initial_model(const TrajectoryData& data, const ProposalKernel& kernel = {});

/// Runs the chain from initial_model(). Throws InvalidConfig for budget < 1
/// and NoStub when the initial model cannot explain the data at all.
ChainResult run_chain(const std::vector<Trajectory>& trajectories, const ChainConfig& cfg,
                      const StepObserver& observer = {});
ChainResult run_chain(const TrajectoryData& data, const Intersection& initial, const ChainConfig& cfg,
                      const StepObserver& observer = {});

}  // namespace lanecast
