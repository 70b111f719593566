#include <doctest.h>

#include <regex>
#include <set>
#include <sstream>

#include "lanecast/error.hpp"
#include "lanecast/io.hpp"
#include "lanecast/svg.hpp"

using namespace lanecast;

namespace {
// Tag balance of a generated document; no attributes contain '>' by design.
bool balanced(const std::string& xml) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = xml.find('<', pos)) != std::string::npos) {
    const std::size_t end = xml.find('>', pos);
    if (end == std::string::npos) return false;
    const std::string tag = xml.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
    if (tag.back() == '/') continue;
    const auto name_end = tag.find_first_of(" \n");
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
    } else {
      stack.push_back(tag.substr(0, name_end));
    }
  }
  return stack.empty();
}

std::vector<Trajectory> sample_data(std::uint64_t seed, Scene* scene = nullptr) {
  const Scene s = random_intersection(seed);
  if (scene) *scene = s;
  SimConfig sim;
  sim.seed = seed;
  return simulate(s.lanes, sim).trajectories;
}
}  // namespace

TEST_CASE("dataset round trip is exact") {
  auto data = sample_data(2);
  data[0].id = "odd \"id\" \\ with \n escapes";
  for (auto& m : data[0].samples) m.id = data[0].id;
  std::stringstream ss;
  write_dataset(ss, data);
  const auto back = read_dataset(ss);
  REQUIRE(back.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(back[i].id == data[i].id);
    REQUIRE(back[i].samples.size() == data[i].samples.size());
    for (std::size_t k = 0; k < data[i].samples.size(); ++k) {
      CHECK(back[i].samples[k].x == data[i].samples[k].x);
      CHECK(back[i].samples[k].y == data[i].samples[k].y);
      CHECK(back[i].samples[k].phi == data[i].samples[k].phi);
      CHECK(back[i].samples[k].t == data[i].samples[k].t);
    }
  }
}

TEST_CASE("malformed datasets") {
  auto bad = [](const std::string& text) {
    std::stringstream ss(text);
    return read_dataset(ss);
  };
  CHECK_THROWS_AS(bad(""), SchemaError);
  CHECK_THROWS_AS(bad("{\"format\":\"other/v9\"}\n"), SchemaError);
  CHECK_THROWS_AS(bad("{\"format\":\"lanecast/v1\"}\n{\"id\":\"a\",\"t\":0,\"x\":0}\n"), SchemaError);
  CHECK_THROWS_AS(bad("{\"format\":\"lanecast/v1\"}\nnot json\n"), SchemaError);
  CHECK_THROWS_AS(bad("{\"format\":\"lanecast/v1\"}\n{\"id\":\"a\",\"t\":0,\"x\":0,\"y\":0,\"phi\":0}\n"),
                  SchemaError);
  CHECK_THROWS_AS(read_dataset_file("/nonexistent/dir/data.jsonl"), IoError);
}

TEST_CASE("intersection and ground truth round trip") {
  Scene s;
  const auto data = sample_data(6, &s);
  const Intersection back = intersection_from_json(to_json(s.intersection));
  REQUIRE(back.arms.size() == s.intersection.arms.size());
  for (std::size_t a = 0; a < back.arms.size(); ++a) {
    CHECK(back.arms[a].alpha == doctest::Approx(s.intersection.arms[a].alpha).epsilon(1e-12));
    CHECK(back.arms[a].entries == s.intersection.arms[a].entries);
    CHECK(back.arms[a].gap == s.intersection.arms[a].gap);
  }

  GroundTruth truth{s.intersection, s.lanes, {}, {}};
  for (std::size_t i = 0; i < data.size(); ++i) {
    truth.trajectory_ids.push_back(data[i].id);
    truth.lane_of.push_back(i % s.lanes.size());
  }
  const Json j = to_json(truth);
  CHECK(j["format"] == kFormat);
  const GroundTruth t2 = ground_truth_from_json(j);
  CHECK(t2.lane_of == truth.lane_of);
  CHECK(t2.trajectory_ids == truth.trajectory_ids);
  REQUIRE(t2.lanes.size() == s.lanes.size());
  for (std::size_t l = 0; l < s.lanes.size(); ++l) {
    CHECK(t2.lanes[l].entry == s.lanes[l].entry);
    CHECK(t2.lanes[l].center_line.points() == s.lanes[l].center_line.points());
  }
  const LaneFile lf = lane_file_from_json(j);
  CHECK(lf.center_lines.size() == s.lanes.size());
  CHECK(lf.lanelets.empty());

  Json broken = j;
  broken["format"] = "lanecast/v0";
  CHECK_THROWS_AS(ground_truth_from_json(broken), SchemaError);
  broken = j;
  broken["lanes"][0]["center_line"] = Json::array({Json::array({0.0, 0.0})});
  CHECK_THROWS_AS(ground_truth_from_json(broken), SchemaError);
}

TEST_CASE("map file and svg") {
  const auto data = sample_data(9);
  EstimatorConfig cfg;
  cfg.chain.budget = 1500;
  const Estimate e = estimate(data, cfg);
  const Json j = map_to_json(e, data);
  CHECK(j["format"] == kFormat);
  const LaneFile lf = lane_file_from_json(j);
  REQUIRE(lf.intersection.has_value());
  CHECK(*lf.intersection == intersection_from_json(to_json(e.intersection)));
  CHECK(lf.center_lines.size() == e.center_lines.size());
  CHECK(lf.lanelets.size() == e.map.lanelets.size());
  std::size_t assigned = 0;
  for (const auto& ids : lf.trajectories) assigned += ids.size();
  CHECK(assigned == data.size());

  const std::string svg = render_svg(lf.lanelets, data, lf.intersection);
  CHECK(balanced(svg));
  CHECK(svg.rfind("<?xml", 0) == 0);
  const std::regex path_id("<path id=\"(lanelet-[0-9]+)\"");
  std::set<std::string> ids;
  std::size_t paths = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), path_id); it != std::sregex_iterator(); ++it) {
    ids.insert((*it)[1]);
    ++paths;
  }
  CHECK(paths == lf.lanelets.size());
  CHECK(ids.size() == paths);
  std::size_t polylines = 0;
  for (std::size_t p = 0; (p = svg.find("<polyline", p)) != std::string::npos; ++p) ++polylines;
  CHECK(polylines == data.size());
  CHECK(svg.find("<path", 0) != std::string::npos);

  Trajectory odd = data[0];
  odd.id = "<&>";
  const std::string esc = render_svg({}, {odd});
  CHECK(balanced(esc));
  CHECK(esc.find("&lt;&amp;&gt;") != std::string::npos);
  CHECK_THROWS_AS(render_svg({}, {}, std::nullopt, SvgStyle{0.0, 1.0, 2}), InvalidConfig);
}

TEST_CASE("reports") {
  EvalReport r;
  r.id = "x";
  r.mean_deviation = 0.125;
  r.matched = 3;
  r.structural = {true, false};
  r.timings = {12.5, 3.25};
  std::stringstream with, without;
  write_csv(with, {r}, true);
  write_csv(without, {r}, false);
  CHECK(with.str().find("coarse_ms") != std::string::npos);
  CHECK(without.str().find("coarse_ms") == std::string::npos);
  CHECK(without.str().find("0.125") != std::string::npos);
  const Json j = to_json(r, false);
  CHECK_FALSE(j.contains("timings"));
  CHECK(to_json(r, true).dump().find("12.5") != std::string::npos);
  std::stringstream table;
  write_table(table, summarize({r}), false);
  CHECK_FALSE(table.str().empty());
}

TEST_CASE("file helpers") {
  CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), IoError);
}
