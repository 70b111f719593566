#pragma once

// Oracle-backed checks shared by the unit tests and the acceptance runner.

#include <cstdint>
#include <vector>

#include "lanecast/evaluation.hpp"

namespace lanecast::testing {

/// Textbook Cox-de Boor recursion, written independently of the library.
double naive_basis(const std::vector<double>& knots, int i, int k, double x);

struct BsplineSuite {
  double partition_error = 0.0;    // max |sum_i N_i(x) - 1|
  double linear_error = 0.0;       // Greville linear reproduction
  double c2_jump = 0.0;            // max second-derivative jump at knots
  double naive_sum_error = 0.0;    // eval vs full naive sum
  double design_row_error = 0.0;   // design-row dot vs eval
};
BsplineSuite bspline_suite(std::uint64_t seed, int points = 1000);

struct SolverSuite {
  double stage1_relative_cost = 0.0;  // worst over the random problems
  double e1_jacobian_error = 0.0;
  double e2_jacobian_error = 0.0;
  int e2_jacobian_checks = 0;
  bool cost_non_increasing = true;
};
SolverSuite solver_suite(std::uint64_t seed, int problems = 20);

/// Single-lane problem with random frame, domain and noisy points.
struct LaneProblem {
  Lane lane;
  std::vector<Trajectory> trajectories;
};
LaneProblem random_lane_problem(std::uint64_t seed);

/// min_c sum (y - N c)^2 over the in-domain points, solved densely.
double least_squares_cost(const LaneProblem& p, std::vector<double>* coefficients = nullptr);
/// sum (y - f(x))^2 for the lane's current spline.
double e1_cost(const Lane& lane, const std::vector<Trajectory>& trajectories);

struct McmcSuite {
  double toy_tv = 1.0;
  bool improving_always_accepted = false;
  double acceptance_rate_error = 1.0;  // max over the tested (r, T)
};
McmcSuite mcmc_suite(std::uint64_t seed, int steps = 100000);

/// Toy posterior over the orientation of a single arm; chain vs grid.
struct ToyChain {
  double tv = 1.0;
  std::vector<double> alphas;  // chain state per step
};
ToyChain toy_chain(std::uint64_t seed, int steps);

/// Two lanes sharing an exit stub. Lane A runs straight through with data on
/// its full length; lane B turns in, with data only on the shared stub, and is
/// shifted sideways by `offset` before refinement.
struct SharedExitFixture {
  Intersection intersection;
  std::vector<Trajectory> trajectories;
  std::vector<TrajectoryAssociation> associations;
  StubId straight_entry;
  StubId turning_entry;
  StubId exit;
};
SharedExitFixture shared_exit_fixture(std::uint64_t seed, double noise_sigma);

struct BimodalityResult {
  double worst = 0.0;  // max over samples of min(|d|, ||d| - w|)
  int samples = 0;
  int skipped = 0;
};
BimodalityResult e2_bimodality(const SharedExitFixture& f, const RefinementConfig& cfg, double offset = 1.0);

}  // namespace lanecast::testing
