#include "lanecast/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "lanecast/error.hpp"

namespace lanecast {

namespace {

constexpr double kDeg = 180.0 / kPi;

void check_format(const Json& j, const char* what) {
  if (!j.is_object() || !j.contains("format")) throw SchemaError(std::string(what) + ": missing format tag");
  if (!j["format"].is_string() || j["format"].get<std::string>() != kFormat)
    throw SchemaError(std::string(what) + ": unsupported format " + j["format"].dump());
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(std::string("field '") + key + "' has the wrong type");
  }
}

const Json& array_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_array())
    throw SchemaError(std::string("missing array '") + key + "'");
  return j.at(key);
}

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Direction direction_from_string(const std::string& s) {
  if (s == "entry") return Direction::Entry;
  if (s == "exit") return Direction::Exit;
  throw SchemaError("unknown direction '" + s + "'");
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

Json to_json(const Point2& p) { return Json::array({p.x, p.y}); }

Json to_json(const Polyline& line) {
  Json j = Json::array();
  for (const auto& p : line.points()) j.push_back(to_json(p));
  return j;
}

Json to_json(const StubId& id) {
  return {{"arm", id.arm}, {"direction", to_string(id.direction)}, {"slot", id.slot}};
}

Json to_json(const Intersection& I) {
  Json arms = Json::array();
  for (const auto& a : I.arms)
    arms.push_back({{"alpha_deg", a.alpha * kDeg}, {"gap", a.gap}, {"entries", a.entries}, {"exits", a.exits}});
  return {{"center", to_json(I.center)}, {"lane_width", I.lane_width}, {"arms", arms}};
}

Point2 point_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw SchemaError("point must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Polyline polyline_from_json(const Json& j) {
  if (!j.is_array()) throw SchemaError("center line must be an array of points");
  std::vector<Point2> pts;
  pts.reserve(j.size());
  for (const auto& p : j) pts.push_back(point_from_json(p));
  try {
    return Polyline(std::move(pts));
  } catch (const InvalidGeometry& e) {
    throw SchemaError(std::string("bad center line: ") + e.what());
  }
}

StubId stub_id_from_json(const Json& j) {
  StubId id;
  id.arm = field<int>(j, "arm");
  id.direction = direction_from_string(field<std::string>(j, "direction"));
  id.slot = field<int>(j, "slot");
  return id;
}

Intersection intersection_from_json(const Json& j) {
  Intersection I;
  if (!j.is_object() || !j.contains("center")) throw SchemaError("intersection needs a center");
  I.center = point_from_json(j["center"]);
  I.lane_width = field<double>(j, "lane_width");
  for (const auto& a : array_field(j, "arms")) {
    Arm arm;
    arm.alpha = field<double>(a, "alpha_deg") / kDeg;
    arm.gap = field<double>(a, "gap");
    arm.entries = field<int>(a, "entries");
    arm.exits = field<int>(a, "exits");
    I.arms.push_back(arm);
  }
  I.sort_arms();
  return I;
}

void write_dataset(std::ostream& out, const std::vector<Trajectory>& trajectories) {
  out << Json{{"format", kFormat}}.dump() << '\n';
  for (const auto& t : trajectories) {
    for (const auto& m : t.samples) {
      const Json line = {{"id", t.id}, {"t", m.t}, {"x", m.x}, {"y", m.y}, {"phi", m.phi}};
      out << line.dump() << '\n';
    }
  }
  if (!out) throw IoError("dataset write failed");
}

std::vector<Trajectory> read_dataset(std::istream& in) {
  std::vector<Measurement> measurements;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw SchemaError("dataset line " + std::to_string(line_no) + " is not valid JSON");
    }
    if (!header) {
      check_format(j, "dataset");
      header = true;
      continue;
    }
    try {
      Measurement m;
      m.id = field<std::string>(j, "id");
      m.t = field<double>(j, "t");
      m.x = field<double>(j, "x");
      m.y = field<double>(j, "y");
      m.phi = field<double>(j, "phi");
      measurements.push_back(std::move(m));
    } catch (const SchemaError& e) {
      throw SchemaError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (in.bad()) throw IoError("dataset read failed");
  if (!header) throw SchemaError("dataset: missing format header");
  auto trajectories = group_measurements(measurements);
  for (const auto& t : trajectories) validate(t);
  return trajectories;
}

Json to_json(const GroundTruth& truth) {
  Json lanes = Json::array();
  for (const auto& l : truth.lanes)
    lanes.push_back({{"entry", to_json(l.entry)}, {"exit", to_json(l.exit)}, {"center_line", to_json(l.center_line)}});
  Json trajectories = Json::array();
  for (std::size_t i = 0; i < truth.trajectory_ids.size(); ++i)
    trajectories.push_back({{"id", truth.trajectory_ids[i]}, {"lane", truth.lane_of[i]}});
  return {{"format", kFormat},
          {"intersection", to_json(truth.intersection)},
          {"lanes", lanes},
          {"trajectories", trajectories}};
}

GroundTruth ground_truth_from_json(const Json& j) {
  check_format(j, "ground truth");
  GroundTruth g;
  if (!j.contains("intersection")) throw SchemaError("ground truth needs an intersection");
  g.intersection = intersection_from_json(j["intersection"]);
  for (const auto& l : array_field(j, "lanes")) {
    GroundTruthLane lane;
    lane.entry = stub_id_from_json(l.value("entry", Json::object()));
    lane.exit = stub_id_from_json(l.value("exit", Json::object()));
    if (!l.contains("center_line")) throw SchemaError("lane without center_line");
    lane.center_line = polyline_from_json(l["center_line"]);
    g.lanes.push_back(std::move(lane));
  }
  if (j.contains("trajectories")) {
    for (const auto& t : array_field(j, "trajectories")) {
      g.trajectory_ids.push_back(field<std::string>(t, "id"));
      const auto lane = field<std::size_t>(t, "lane");
      if (lane >= g.lanes.size()) throw SchemaError("trajectory refers to a missing lane");
      g.lane_of.push_back(lane);
    }
  }
  return g;
}

Json map_to_json(const Estimate& estimate, const std::vector<Trajectory>& trajectories) {
  std::vector<Json> ids(estimate.center_lines.size(), Json::array());
  for (std::size_t t = 0; t < estimate.lane_of.size() && t < trajectories.size(); ++t)
    ids[estimate.lane_of[t]].push_back(trajectories[t].id);
  Json lanes = Json::array();
  for (std::size_t l = 0; l < estimate.center_lines.size(); ++l) {
    const Lane& lane = estimate.refinement.lanes[l];
    Json lanelets = Json::array();
    for (const auto& ll : estimate.map.lanelets) {
      if (std::find(ll.lanes.begin(), ll.lanes.end(), l) != ll.lanes.end()) lanelets.push_back(ll.id);
    }
    lanes.push_back({{"id", l},
                     {"entry", to_json(lane.entry)},
                     {"exit", to_json(lane.exit)},
                     {"center_line", to_json(estimate.center_lines[l])},
                     {"lanelets", lanelets},
                     {"trajectories", ids[l]}});
  }
  Json lanelets = Json::array();
  for (const auto& ll : estimate.map.lanelets) {
    lanelets.push_back({{"id", ll.id},
                        {"center_line", to_json(ll.center_line)},
                        {"predecessors", ll.predecessors},
                        {"successors", ll.successors},
                        {"lanes", ll.lanes}});
  }
  return {{"format", kFormat},
          {"intersection", to_json(estimate.intersection)},
          {"lanes", lanes},
          {"lanelets", lanelets},
          {"merge_log", estimate.map.merge_log}};
}

LaneFile lane_file_from_json(const Json& j) {
  check_format(j, "lane file");
  LaneFile f;
  if (j.contains("intersection")) f.intersection = intersection_from_json(j["intersection"]);
  const Json& lanes = array_field(j, "lanes");
  f.trajectories.assign(lanes.size(), {});
  for (const auto& l : lanes) {
    if (!l.is_object() || !l.contains("center_line")) throw SchemaError("lane without center_line");
    f.center_lines.push_back(polyline_from_json(l["center_line"]));
  }
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    if (lanes[i].contains("trajectories")) {
      for (const auto& id : lanes[i]["trajectories"]) {
        if (!id.is_string()) throw SchemaError("trajectory ids must be strings");
        f.trajectories[i].push_back(id.get<std::string>());
      }
    }
  }
  // Ground-truth files list the association per trajectory instead.
  if (j.contains("trajectories")) {
    for (const auto& t : array_field(j, "trajectories")) {
      const auto lane = field<std::size_t>(t, "lane");
      if (lane >= lanes.size()) throw SchemaError("trajectory refers to a missing lane");
      f.trajectories[lane].push_back(field<std::string>(t, "id"));
    }
  }
  if (j.contains("lanelets")) {
    for (const auto& ll : array_field(j, "lanelets")) {
      if (!ll.contains("center_line")) throw SchemaError("lanelet without center_line");
      f.lanelets.emplace_back(field<int>(ll, "id"), polyline_from_json(ll["center_line"]));
    }
  }
  return f;
}

Json to_json(const StepRecord& step) {
  return {{"step", step.step},
          {"move", std::string(to_string(step.move))},
          {"accepted", step.accepted},
          {"log_posterior", step.log_posterior},
          {"temperature", step.temperature}};
}

Json to_json(const EvalReport& r, bool timings) {
  Json j = {{"id", r.id}, {"failed", r.failed}};
  if (r.failed) {
    j["error"] = r.error;
    return j;
  }
  j["mean_deviation"] = r.mean_deviation;
  j["lane_deviations"] = r.lane_deviations;
  j["matched"] = r.matched;
  j["misses"] = r.misses;
  j["ghosts"] = r.ghosts;
  j["structural"] = {{"arm_count", r.structural.arm_count}, {"lane_counts", r.structural.lane_counts}};
  j["association_accuracy"] = r.association_accuracy;
  j["arms"] = r.arms;
  j["lanes"] = r.lanes;
  j["measurements"] = r.measurements;
  if (timings) j["timings"] = {{"coarse_ms", r.timings.coarse_ms}, {"refine_ms", r.timings.refine_ms}};
  return j;
}

Json to_json(const Summary& s, bool timings) {
  Json j = {{"count", s.count},
            {"failures", s.failures},
            {"structural_ok", s.structural_ok},
            {"mean_deviation", s.mean_deviation},
            {"median_deviation", s.median_deviation},
            {"p95_deviation", s.p95_deviation},
            {"mean_deviation_all", s.mean_deviation_all},
            {"mean_association_accuracy", s.mean_association_accuracy}};
  if (timings) {
    j["mean_coarse_ms"] = s.mean_coarse_ms;
    j["mean_refine_ms"] = s.mean_refine_ms;
    j["max_total_ms"] = s.max_total_ms;
  }
  return j;
}

Json to_json(const BenchmarkReport& report, bool timings) {
  Json rows = Json::array();
  for (const auto& r : report.rows) rows.push_back(to_json(r, timings));
  return {{"format", kFormat}, {"summary", to_json(report.summary, timings)}, {"rows", rows}};
}

void write_csv(std::ostream& out, const std::vector<EvalReport>& rows, bool timings) {
  out << "id,failed,mean_deviation,matched,misses,ghosts,arm_count_ok,lane_counts_ok,association_accuracy";
  if (timings) out << ",coarse_ms,refine_ms";
  out << '\n';
  for (const auto& r : rows) {
    out << r.id << ',' << (r.failed ? 1 : 0) << ',' << number(r.mean_deviation) << ',' << r.matched << ','
        << r.misses << ',' << r.ghosts << ',' << (r.structural.arm_count ? 1 : 0) << ','
        << (r.structural.lane_counts ? 1 : 0) << ',' << number(r.association_accuracy);
    if (timings) out << ',' << number(r.timings.coarse_ms) << ',' << number(r.timings.refine_ms);
    out << '\n';
  }
}

void write_table(std::ostream& out, const Summary& s, bool timings) {
  char buf[128];
  auto row = [&](const char* label, const char* fmt, double v) {
    std::snprintf(buf, sizeof buf, fmt, v);
    out << label << std::string(28 - std::string(label).size(), ' ') << buf << '\n';
  };
  row("intersections", "%.0f", s.count);
  row("failures", "%.0f", s.failures);
  row("structurally correct", "%.0f", s.structural_ok);
  row("mean deviation [m]", "%.4f", s.mean_deviation);
  row("median deviation [m]", "%.4f", s.median_deviation);
  row("p95 deviation [m]", "%.4f", s.p95_deviation);
  row("mean deviation, all [m]", "%.4f", s.mean_deviation_all);
  row("association accuracy", "%.4f", s.mean_association_accuracy);
  if (timings) {
    row("mean coarse [ms]", "%.1f", s.mean_coarse_ms);
    row("mean refine [ms]", "%.1f", s.mean_refine_ms);
    row("max total [ms]", "%.1f", s.max_total_ms);
  }
}

Json read_json_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error&) {
    throw SchemaError(path.string() + " is not valid JSON");
  }
  return j;
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::vector<Trajectory> read_dataset_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_dataset(in);
}

void write_dataset_file(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories) {
  auto out = open_out(path);
  write_dataset(out, trajectories);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace lanecast
