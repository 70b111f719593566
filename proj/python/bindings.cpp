#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lanecast/error.hpp"
#include "lanecast/evaluation.hpp"
#include "lanecast/io.hpp"
#include "lanecast/svg.hpp"

namespace py = pybind11;
using namespace lanecast;

namespace {

using PointList = std::vector<std::pair<double, double>>;

Polyline to_polyline(const PointList& pts) {
  std::vector<Point2> p;
  p.reserve(pts.size());
  for (const auto& [x, y] : pts) p.push_back({x, y});
  return Polyline(std::move(p));
}

PointList to_points(const Polyline& line) {
  PointList out;
  for (const auto& p : line.points()) out.emplace_back(p.x, p.y);
  return out;
}

// Scenes and maps cross the boundary as the same JSON documents the CLI writes.
py::tuple simulate_scene(std::uint64_t seed, double noise_sigma, int arms, int lanes_max) {
  GeneratorConfig gen;
  if (arms > 0) gen.arms_min = gen.arms_max = arms;
  if (lanes_max > 0) gen.lanes_max = lanes_max;
  const Scene scene = random_intersection(seed, gen);
  SimConfig sim;
  sim.noise_sigma = noise_sigma;
  sim.seed = simulation_seed(seed);
  const SimulationResult data = simulate(scene.lanes, sim);
  GroundTruth truth{scene.intersection, scene.lanes, {}, data.lane_of};
  for (const auto& t : data.trajectories) truth.trajectory_ids.push_back(t.id);
  std::ostringstream dataset;
  write_dataset(dataset, data.trajectories);
  return py::make_tuple(dataset.str(), to_json(truth).dump());
}

py::dict estimate_dataset(const std::string& dataset, int samples, std::uint64_t seed) {
  std::istringstream in(dataset);
  const auto trajectories = read_dataset(in);
  EstimatorConfig cfg;
  cfg.chain.budget = samples;
  cfg.chain.seed = seed;
  Estimate e;
  {
    py::gil_scoped_release release;
    e = estimate(trajectories, cfg);
  }
  py::dict out;
  out["map"] = map_to_json(e, trajectories).dump();
  out["coarse_ms"] = e.timings.coarse_ms;
  out["refine_ms"] = e.timings.refine_ms;
  return out;
}

std::string render(const std::string& map_json, const std::string& dataset) {
  const LaneFile f = lane_file_from_json(Json::parse(map_json));
  std::vector<Trajectory> trajectories;
  if (!dataset.empty()) {
    std::istringstream in(dataset);
    trajectories = read_dataset(in);
  }
  return render_svg(f.lanelets, trajectories, f.intersection);
}

}  // namespace

PYBIND11_MODULE(_lanecast, m) {
  m.doc() = "Lane-level intersection geometry from vehicle trajectories";

  py::register_exception<Error>(m, "Error");
  py::register_exception<SchemaError>(m, "SchemaError");
  py::register_exception<InvalidConfig>(m, "InvalidConfig");

  py::class_<UniformCubicSpline>(m, "UniformCubicSpline")
      .def(py::init<double, double, std::vector<double>>(), py::arg("x_min"), py::arg("x_max"),
           py::arg("control_points"))
      .def_property_readonly("x_min", &UniformCubicSpline::x_min)
      .def_property_readonly("x_max", &UniformCubicSpline::x_max)
      .def_property_readonly("knots", &UniformCubicSpline::knots)
      .def("__len__", &UniformCubicSpline::size)
      .def("__call__", &UniformCubicSpline::eval, py::arg("x"))
      .def("derivative", &UniformCubicSpline::derivative, py::arg("x"), py::arg("order") = 1)
      .def("basis", &UniformCubicSpline::basis, py::arg("i"), py::arg("x"))
      .def("greville", &UniformCubicSpline::greville, py::arg("i"));

  m.def(
      "centerline_deviation",
      [](const PointList& estimated, const PointList& truth, bool symmetric) {
        return centerline_deviation(to_polyline(estimated), to_polyline(truth), symmetric);
      },
      py::arg("estimated"), py::arg("truth"), py::arg("symmetric") = false);
  m.def(
      "resample", [](const PointList& line, double spacing) { return to_points(to_polyline(line).resampled(spacing)); },
      py::arg("line"), py::arg("spacing"));

  m.def("simulate", &simulate_scene, py::arg("seed"), py::arg("noise_sigma") = 1.0, py::arg("arms") = 0,
        py::arg("lanes_max") = 0, "Returns (dataset JSON Lines, ground-truth JSON).");
  m.def("estimate", &estimate_dataset, py::arg("dataset"), py::arg("samples") = 5000, py::arg("seed") = 0);
  m.def("render_svg", &render, py::arg("map"), py::arg("dataset") = "");
  m.attr("FORMAT") = kFormat;
}
