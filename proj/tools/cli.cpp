#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include "lanecast/error.hpp"
#include "lanecast/io.hpp"
#include "lanecast/svg.hpp"

namespace lanecast::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kDeg = kPi / 180.0;

class ChainFailure : public Error {
 public:
  using Error::Error;
};

// Reads one object of the config file and remembers which keys were consumed.
class Section {
 public:
  Section(const Json* node, std::string name) : node_(node), name_(std::move(name)) {
    if (node_ && !node_->is_object()) throw InvalidConfig("config section '" + name_ + "' must be an object");
  }

  template <class T>
  Section& get(const char* key, T& target) {
    seen_.insert(key);
    if (node_ && node_->contains(key)) {
      try {
        target = node_->at(key).get<T>();
      } catch (const nlohmann::json::exception&) {
        throw InvalidConfig("config key '" + qualified(key) + "' has the wrong type");
      }
    }
    return *this;
  }

  Section& degrees(const char* key, double& radians) {
    double deg = radians / kDeg;
    get(key, deg);
    radians = deg * kDeg;
    return *this;
  }

  Section child(const char* key) {
    seen_.insert(key);
    return Section(node_ && node_->contains(key) ? &node_->at(key) : nullptr, qualified(key));
  }

  void done() const {
    if (!node_) return;
    for (const auto& [key, value] : node_->items()) {
      if (!seen_.count(key)) throw InvalidConfig("unknown config key '" + qualified(key) + "'");
    }
  }

 private:
  std::string qualified(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  const Json* node_;
  std::string name_;
  std::set<std::string> seen_;
};

// Flag values override the config only when the flag was given.
class Overrides {
 public:
  template <class T, class Setter>
  CLI::Option* add(CLI::App* app, const std::string& name, const std::string& help, Setter setter) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *value, help);
    apply_.push_back([opt, value, setter] {
      if (opt->count() > 0) setter(*value);
    });
    return opt;
  }

  void apply() const {
    for (const auto& f : apply_) f();
  }

 private:
  std::vector<std::function<void()>> apply_;
};

struct Common {
  std::string config;
  std::string out;
  Overrides overrides;
  RunConfig cfg;

  void add(CLI::App* app, bool out_required, const std::string& out_help) {
    app->add_option("--config", config, "JSON config file");
    auto* o = app->add_option("--out", out, out_help);
    if (out_required) o->required();
    overrides.add<std::uint64_t>(app, "--seed", "random seed", [this](std::uint64_t v) { cfg.seed = v; });
  }

  // defaults < config file < flags
  void resolve() {
    if (!config.empty()) load_config(config, cfg);
    overrides.apply();
    validate(cfg);
  }
};

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw IoError("cannot read " + path);
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void add_chain_flags(CLI::App* app, Common& c) {
  c.overrides.add<int>(app, "--samples", "coarse MCMC sample budget", [&c](int v) { c.cfg.estimator.chain.budget = v; });
}

void add_simulation_flags(CLI::App* app, Common& c) {
  auto& o = c.overrides;
  auto& cfg = c.cfg;
  o.add<int>(app, "--arms", "number of arms", [&cfg](int v) { cfg.generator.arms_min = cfg.generator.arms_max = v; });
  o.add<int>(app, "--lanes-min", "minimum lanes per direction", [&cfg](int v) { cfg.generator.lanes_min = v; });
  o.add<int>(app, "--lanes-max", "maximum lanes per direction", [&cfg](int v) { cfg.generator.lanes_max = v; });
  o.add<double>(app, "--noise-sigma", "position noise per axis [m]",
                [&cfg](double v) { cfg.simulation.noise_sigma = v; });
  o.add<double>(app, "--heading-sigma-deg", "heading noise [deg]",
                [&cfg](double v) { cfg.simulation.noise_sigma_heading = v * kDeg; });
  o.add<int>(app, "--trajectories-min", "minimum trajectories per lane",
             [&cfg](int v) { cfg.simulation.trajectories_per_lane_min = v; });
  o.add<int>(app, "--trajectories-max", "maximum trajectories per lane",
             [&cfg](int v) { cfg.simulation.trajectories_per_lane_max = v; });
  o.add<double>(app, "--spacing", "sample spacing along a lane [m]",
                [&cfg](double v) { cfg.simulation.sample_spacing = v; });
}

Json intersection_document(const Intersection& I) {
  Json j = {{"format", kFormat}};
  j.update(to_json(I));
  return j;
}

std::vector<std::pair<int, Polyline>> lanelets_of(const LaneFile& f) {
  if (!f.lanelets.empty()) return f.lanelets;
  std::vector<std::pair<int, Polyline>> out;
  for (std::size_t i = 0; i < f.center_lines.size(); ++i) out.emplace_back(static_cast<int>(i), f.center_lines[i]);
  return out;
}

int cmd_simulate(Common& c, std::ostream& out) {
  c.resolve();
  const fs::path dir = c.out;
  prepare_dir(dir);
  const Scene scene = random_intersection(c.cfg.seed, c.cfg.generator);
  SimConfig sim = c.cfg.simulation;
  sim.seed = simulation_seed(c.cfg.seed);
  const SimulationResult data = simulate(scene.lanes, sim);

  GroundTruth truth{scene.intersection, scene.lanes, {}, data.lane_of};
  for (const auto& t : data.trajectories) truth.trajectory_ids.push_back(t.id);
  write_dataset_file(dir / "dataset.jsonl", data.trajectories);
  write_json_file(dir / "truth.json", to_json(truth));
  out << "arms " << scene.intersection.arms.size() << " lanes " << scene.lanes.size() << " trajectories "
      << data.trajectories.size() << " points " << measurement_count(data.trajectories) << '\n';
  return kOk;
}

struct EstimateArgs {
  std::string input;
  std::string render;
  std::string trace;
  bool no_timings = false;
};

int cmd_estimate(Common& c, const EstimateArgs& a, std::ostream& out) {
  c.resolve();
  require_file(a.input);
  const fs::path dir = c.out;
  prepare_dir(dir);
  const auto trajectories = read_dataset_file(a.input);

  EstimatorConfig est = c.cfg.estimator;
  est.chain.seed = c.cfg.seed;
  std::ofstream trace;
  StepObserver observer;
  if (!a.trace.empty()) {
    trace.open(a.trace, std::ios::binary);
    if (!trace) throw IoError("cannot write " + a.trace);
    observer = [&trace](const StepRecord& s, const Intersection&) { trace << to_json(s).dump() << '\n'; };
  }

  Estimate e;
  try {
    e = estimate(trajectories, est, observer);
  } catch (const SchemaError&) {
    throw;
  } catch (const InvalidConfig&) {
    throw;
  } catch (const Error& err) {
    throw ChainFailure(std::string("estimation failed: ") + err.what());
  }
  if (trace.is_open() && !trace) throw IoError("trace write failed");

  write_json_file(dir / "intersection.json", intersection_document(e.intersection));
  write_json_file(dir / "map.json", map_to_json(e, trajectories));
  if (!a.no_timings) {
    write_json_file(dir / "timings.json", {{"format", kFormat},
                                           {"samples", est.chain.budget},
                                           {"coarse_ms", e.timings.coarse_ms},
                                           {"refine_ms", e.timings.refine_ms}});
  }
  if (!a.render.empty()) {
    std::vector<std::pair<int, Polyline>> lanelets;
    for (const auto& ll : e.map.lanelets) lanelets.emplace_back(ll.id, ll.center_line);
    write_text_file(a.render, render_svg(lanelets, trajectories, e.intersection));
  }

  out << "arms " << e.intersection.arms.size() << " lanes " << e.center_lines.size() << " lanelets "
      << e.map.lanelets.size() << " trajectories " << trajectories.size() << '\n';
  if (!a.no_timings) {
    out << "coarse " << fixed(e.timings.coarse_ms, 1) << " ms refine " << fixed(e.timings.refine_ms, 1) << " ms\n";
  }
  return kOk;
}

struct EvalArgs {
  std::string estimate;
  std::string truth;
  bool symmetric = false;
};

int cmd_eval(Common& c, const EvalArgs& a, std::ostream& out) {
  c.resolve();
  require_file(a.estimate);
  require_file(a.truth);
  if (!c.out.empty()) prepare_dir(c.out);
  const LaneFile est = lane_file_from_json(read_json_file(a.estimate));
  const GroundTruth truth = ground_truth_from_json(read_json_file(a.truth));
  if (est.center_lines.empty()) throw SchemaError("estimate holds no lanes");
  if (truth.lanes.empty()) throw SchemaError("ground truth holds no lanes");

  std::vector<Polyline> truth_lines;
  for (const auto& l : truth.lanes) truth_lines.push_back(l.center_line);
  EvalReport r = evaluate_lines(est.center_lines, truth_lines, a.symmetric);
  r.id = fs::path(a.estimate).stem().string();
  r.arms = static_cast<int>(truth.intersection.arms.size());
  r.lanes = static_cast<int>(truth.lanes.size());
  if (est.intersection) r.structural = check_structure(*est.intersection, truth.intersection);

  std::map<std::string, std::size_t> est_lane;
  for (std::size_t l = 0; l < est.trajectories.size(); ++l)
    for (const auto& id : est.trajectories[l]) est_lane[id] = l;
  if (!truth.trajectory_ids.empty() && !est_lane.empty()) {
    std::vector<std::size_t> estimated;
    for (const auto& id : truth.trajectory_ids) {
      const auto it = est_lane.find(id);
      estimated.push_back(it == est_lane.end() ? static_cast<std::size_t>(-1) : it->second);
    }
    r.association_accuracy =
        association_accuracy(estimated, truth.lane_of, match_lanes(est.center_lines, truth_lines, kLaneWidth, a.symmetric));
  }

  if (!c.out.empty()) {
    const fs::path dir = c.out;
    write_json_file(dir / "report.json", {{"format", kFormat}, {"report", to_json(r, false)}});
    std::ostringstream csv;
    write_csv(csv, {r}, false);
    write_text_file(dir / "report.csv", csv.str());
  }
  out << "mean deviation " << fixed(r.mean_deviation, 4) << " m\n";
  out << "matched " << r.matched << " misses " << r.misses << " ghosts " << r.ghosts << '\n';
  if (est.intersection) {
    out << "arm count " << (r.structural.arm_count ? "ok" : "wrong") << " lane counts "
        << (r.structural.lane_counts ? "ok" : "wrong") << '\n';
  }
  out << "association accuracy " << fixed(r.association_accuracy, 4) << '\n';
  return kOk;
}

int cmd_benchmark(Common& c, bool no_timings, std::ostream& out) {
  c.resolve();
  const fs::path dir = c.out;
  prepare_dir(dir);
  BenchmarkConfig b;
  b.intersections = c.cfg.intersections;
  b.seed = c.cfg.seed;
  b.generator = c.cfg.generator;
  b.simulation = c.cfg.simulation;
  b.estimator = c.cfg.estimator;

  const BenchmarkReport report = run_benchmark(b, [&](const EvalReport& r) {
    out << r.id;
    if (r.failed) {
      out << " failed: " << r.error << '\n';
      return;
    }
    out << " deviation " << fixed(r.mean_deviation, 4) << " structure " << (r.structural.ok() ? "ok" : "wrong")
        << " association " << fixed(r.association_accuracy, 3);
    if (!no_timings) out << " coarse " << fixed(r.timings.coarse_ms, 1) << " ms refine " << fixed(r.timings.refine_ms, 1) << " ms";
    out << '\n';
    out.flush();
  });

  const bool timings = !no_timings;
  write_json_file(dir / "report.json", to_json(report, timings));
  std::ostringstream csv;
  write_csv(csv, report.rows, timings);
  write_text_file(dir / "rows.csv", csv.str());
  std::ostringstream table;
  write_table(table, report.summary, timings);
  write_text_file(dir / "summary.txt", table.str());
  out << table.str();
  return kOk;
}

struct RenderArgs {
  std::string map;
  std::string dataset;
};

int cmd_render(Common& c, const RenderArgs& a, std::ostream& out) {
  c.resolve();
  require_file(a.map);
  if (!a.dataset.empty()) require_file(a.dataset);
  const LaneFile f = lane_file_from_json(read_json_file(a.map));
  std::vector<Trajectory> trajectories;
  if (!a.dataset.empty()) trajectories = read_dataset_file(a.dataset);
  const auto lanelets = lanelets_of(f);
  write_text_file(c.out, render_svg(lanelets, trajectories, f.intersection));
  out << "lanelets " << lanelets.size() << " trajectories " << trajectories.size() << '\n';
  return kOk;
}

}  // namespace

void load_config(const fs::path& path, RunConfig& cfg) {
  Json j;
  try {
    j = read_json_file(path);
  } catch (const SchemaError& e) {
    throw InvalidConfig(e.what());
  }
  if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
  Section root(&j, "");
  root.get("seed", cfg.seed).get("intersections", cfg.intersections);

  auto& g = cfg.generator;
  Section gen = root.child("generator");
  gen.get("arms_min", g.arms_min)
      .get("arms_max", g.arms_max)
      .get("lanes_min", g.lanes_min)
      .get("lanes_max", g.lanes_max)
      .get("min_separation_deg", g.min_separation_deg)
      .get("jitter_deg", g.jitter_deg)
      .get("gap_min", g.gap_min)
      .get("gap_max", g.gap_max)
      .get("center_spread", g.center_spread)
      .get("stub_length", g.stub_length)
      .done();

  auto& s = cfg.simulation;
  Section sim = root.child("simulation");
  sim.get("trajectories_per_lane_min", s.trajectories_per_lane_min)
      .get("trajectories_per_lane_max", s.trajectories_per_lane_max)
      .get("sample_spacing", s.sample_spacing)
      .get("noise_sigma", s.noise_sigma)
      .degrees("noise_sigma_heading_deg", s.noise_sigma_heading)
      .get("assumed_speed", s.assumed_speed)
      .done();

  auto& ch = cfg.estimator.chain;
  Section chain = root.child("chain");
  chain.get("budget", ch.budget)
      .get("t_start", ch.schedule.t_start)
      .get("t_end", ch.schedule.t_end)
      .get("sigma_pos", ch.likelihood.sigma_pos)
      .degrees("sigma_ang_deg", ch.likelihood.sigma_ang)
      .get("use_multinomial", ch.likelihood.use_multinomial)
      .get("outlier_mahalanobis", ch.likelihood.outlier_mahalanobis)
      .get("candidate_arms", ch.likelihood.candidate_arms)
      .degrees("rotate_half_range_deg", ch.kernel.rotate_half_range)
      .get("shift_max_radius", ch.kernel.shift_max_radius)
      .get("gap_half_range", ch.kernel.gap_half_range)
      .get("new_arm_gap", ch.kernel.new_arm_gap)
      .get("min_arms", ch.kernel.min_arms);
  auto& p = ch.kernel.probabilities;
  Section moves = chain.child("move_probabilities");
  moves.get("rotate", p.rotate).get("shift", p.shift).get("gap", p.gap).get("arm", p.arm).get("lane", p.lane).done();
  chain.done();

  auto& r = cfg.estimator.refinement;
  Section ref = root.child("refinement");
  ref.get("control_points", r.control_points)
      .get("stage1_iterations", r.stage1_iterations)
      .get("total_iterations", r.total_iterations)
      .get("delta", r.delta)
      .get("e2_samples_per_lane", r.e2_samples_per_lane)
      .get("initial_damping", r.initial_damping)
      .get("max_damping", r.max_damping)
      .get("tolerance", r.tolerance)
      .get("e2_weight", r.e2_weight)
      .get("stub_length", r.stub_length)
      .get("stub_extension", r.stub_extension)
      .done();
  root.done();
}

void validate(const RunConfig& cfg) {
  if (cfg.intersections < 1) throw InvalidConfig("intersections must be >= 1");
  const auto& g = cfg.generator;
  if (g.arms_min < 2 || g.arms_max < g.arms_min) throw InvalidConfig("arms: need 2 <= min <= max");
  if (g.lanes_min < 1 || g.lanes_max < g.lanes_min) throw InvalidConfig("lanes: need 1 <= min <= max");
  if (!(g.gap_min >= 0.0) || g.gap_max < g.gap_min) throw InvalidConfig("gap: need 0 <= min <= max");
  if (!(g.stub_length > 0.0) || !(g.center_spread >= 0.0)) throw InvalidConfig("bad generator lengths");
  try {
    cfg.simulation.validate();
  } catch (const InvalidGeometry& e) {
    throw InvalidConfig(e.what());
  }
  const auto& ch = cfg.estimator.chain;
  if (ch.budget < 1) throw InvalidConfig("sample budget must be >= 1");
  if (!(ch.schedule.t_end > 0.0) || !(ch.schedule.t_start >= ch.schedule.t_end))
    throw InvalidConfig("temperatures need t_start >= t_end > 0");
  ch.kernel.validate();
  ch.likelihood.validate();
  cfg.estimator.refinement.validate();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lane-level intersection geometry from vehicle trajectories", "lanecast"};
  app.require_subcommand(1);

  Common sim_c, est_c, eval_c, bench_c, render_c;

  auto* sim = app.add_subcommand("simulate", "write a synthetic dataset and its ground truth");
  sim_c.add(sim, true, "output directory");
  add_simulation_flags(sim, sim_c);

  EstimateArgs est_a;
  auto* est = app.add_subcommand("estimate", "estimate the intersection and its lanes from a dataset");
  est_c.add(est, true, "output directory");
  est->add_option("--input,-i", est_a.input, "dataset (JSON Lines)")->required();
  est->add_option("--render", est_a.render, "also write an SVG picture");
  est->add_option("--trace", est_a.trace, "write the chain trace (JSON Lines)");
  est->add_flag("--no-timings", est_a.no_timings, "omit wall-clock timings");
  add_chain_flags(est, est_c);

  EvalArgs eval_a;
  auto* ev = app.add_subcommand("eval", "compare an estimated map with ground truth");
  eval_c.add(ev, false, "output directory for report.json and report.csv");
  ev->add_option("--estimate", eval_a.estimate, "map JSON")->required();
  ev->add_option("--truth", eval_a.truth, "ground-truth JSON")->required();
  ev->add_flag("--symmetric", eval_a.symmetric, "average the deviation in both directions");

  bool bench_no_timings = false;
  auto* bench = app.add_subcommand("benchmark", "simulate, estimate and evaluate many intersections");
  bench_c.add(bench, true, "output directory");
  bench_c.overrides.add<int>(bench, "--intersections,-n", "number of intersections",
                             [&bench_c](int v) { bench_c.cfg.intersections = v; });
  bench->add_flag("--no-timings", bench_no_timings, "omit wall-clock timings from all output");
  add_simulation_flags(bench, bench_c);
  add_chain_flags(bench, bench_c);

  RenderArgs render_a;
  auto* render = app.add_subcommand("render", "draw a map and a dataset as SVG");
  render_c.add(render, true, "SVG file");
  render->add_option("--map", render_a.map, "map or ground-truth JSON")->required();
  render->add_option("--dataset", render_a.dataset, "dataset (JSON Lines)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_c, out);
    if (est->parsed()) return cmd_estimate(est_c, est_a, out);
    if (ev->parsed()) return cmd_eval(eval_c, eval_a, out);
    if (bench->parsed()) return cmd_benchmark(bench_c, bench_no_timings, out);
    if (render->parsed()) return cmd_render(render_c, render_a, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const InvalidConfig& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const InvalidGeometry& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const GenerationFailed& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const ChainFailure& e) {
    err << "error: " << e.what() << '\n';
    return kChainFailure;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kSchemaMismatch;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace lanecast::cli
