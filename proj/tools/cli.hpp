#pragma once

#include <filesystem>
#include <iosfwd>

#include "lanecast/evaluation.hpp"

namespace lanecast::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kIoFailure = 2,
  kInvalidConfig = 3,
  kChainFailure = 4,
  kSchemaMismatch = 5,
};

/// Every tunable of the pipeline, filled from defaults, a config file and flags
/// in that order.
struct RunConfig {
  std::uint64_t seed = 0;
  int intersections = 50;
  GeneratorConfig generator;
  SimConfig simulation;
  EstimatorConfig estimator;
};

/// Applies a JSON config file on top of `cfg`. Unknown keys and wrong types
/// throw InvalidConfig; unreadable files throw IoError.
void load_config(const std::filesystem::path& path, RunConfig& cfg);

/// Throws InvalidConfig when any module would reject the configuration.
void validate(const RunConfig& cfg);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lanecast::cli
