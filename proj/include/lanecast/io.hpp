#pragma once

// File formats: JSON Lines datasets, ground truth, estimated maps, chain
// traces and evaluation reports. Everything carries the "lanecast/v1" tag.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lanecast/evaluation.hpp"

namespace lanecast {

inline constexpr const char* kFormat = "lanecast/v1";

using Json = nlohmann::ordered_json;

Json to_json(const Point2& p);
Json to_json(const Polyline& line);
Json to_json(const StubId& id);
/// {center:[x,y], lane_width, arms:[{alpha_deg, gap, entries, exits}]}
Json to_json(const Intersection& I);

Point2 point_from_json(const Json& j);
Polyline polyline_from_json(const Json& j);
StubId stub_id_from_json(const Json& j);
Intersection intersection_from_json(const Json& j);

/// Header line {"format": ...} followed by one {"id","t","x","y","phi"} object
/// per measurement, trajectories in order.
void write_dataset(std::ostream& out, const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> read_dataset(std::istream& in);

struct GroundTruth {
  Intersection intersection;
  std::vector<GroundTruthLane> lanes;
  std::vector<std::string> trajectory_ids;
  std::vector<std::size_t> lane_of;  // parallel to trajectory_ids
};

Json to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const Json& j);

/// Estimated model with lanes (entry, exit, center line, trajectory ids) and
/// the merged lanelets.
Json map_to_json(const Estimate& estimate, const std::vector<Trajectory>& trajectories);

/// The part of a map or ground-truth file needed for evaluation. Both files
/// share the "lanes" layout, so either can be read here.
struct LaneFile {
  std::optional<Intersection> intersection;
  std::vector<Polyline> center_lines;
  /// Trajectory ids per lane; empty when the file carries no association.
  std::vector<std::vector<std::string>> trajectories;
  /// (id, center line) of every lanelet; empty for ground-truth files.
  std::vector<std::pair<int, Polyline>> lanelets;
};

LaneFile lane_file_from_json(const Json& j);

/// One JSON object per chain step.
Json to_json(const StepRecord& step);

Json to_json(const EvalReport& report, bool timings = true);
Json to_json(const Summary& summary, bool timings = true);
Json to_json(const BenchmarkReport& report, bool timings = true);

/// Per-intersection rows; timing columns are left out when `timings` is false.
void write_csv(std::ostream& out, const std::vector<EvalReport>& rows, bool timings = true);
/// Plain-text summary table.
void write_table(std::ostream& out, const Summary& summary, bool timings = true);

/// Throw IoError when a file cannot be opened or written and SchemaError for
/// content that is not JSON. Format tags are checked by the *_from_json readers.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);
std::vector<Trajectory> read_dataset_file(const std::filesystem::path& path);
void write_dataset_file(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lanecast
