#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "toponav/toponav.hpp"

namespace {

using namespace toponav;

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_double(trim(tok), "values"));
  if (out.empty()) throw ParseError("values: empty list");
  return out;
}

struct CliOptions {
  std::string scenario_path;
  std::string config_path;
  std::string out_path;
  std::string trace_dir;
  std::string policy = "teacher_r2r";
  std::string sliding;
  std::string tryout;
  std::string select;
  std::string ne;
  std::string weights;
  double gamma = 0.5;
  double chassis = 0.0;
  int k = 5;
  int parallelism = 1;
  long seed = 1;
  std::string gamma_values = "0.25,0.5,0.75,1.0";
};

// Precedence: defaults < config file < environment < explicit CLI flags.
RunConfig build_config(const CliOptions& opt, const CLI::App* cmd) {
  RunConfig cfg;
  if (!opt.config_path.empty()) {
    std::ifstream f(opt.config_path);
    if (!f) throw ParseError("cannot open config file: " + opt.config_path);
    apply_config_file(cfg, f, opt.config_path);
  }
  apply_env(cfg);
  auto set_if = [&](const char* flag, const char* key, const std::string& value) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    if (opt != nullptr && opt->count() > 0) apply_config_kv(cfg, key, value);
  };
  set_if("--gamma", "gamma", fmt_g(opt.gamma));
  set_if("--seed", "seed", std::to_string(opt.seed));
  set_if("--k", "k", std::to_string(opt.k));
  set_if("--policy", "policy", opt.policy);
  set_if("--sliding", "sliding", opt.sliding);
  set_if("--tryout", "tryout", opt.tryout);
  set_if("--select", "select", opt.select);
  set_if("--ne", "ne", opt.ne);
  set_if("--weights", "weights", opt.weights);
  set_if("--chassis", "chassis_radius", fmt_g(opt.chassis));
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open output file: " + path);
  f << content;
}

int cmd_run(const CliOptions& opt, const CLI::App* cmd, bool no_delete, bool no_accumulate) {
  RunConfig cfg = build_config(opt, cmd);
  if (no_delete) cfg.ghost_deletion = false;
  if (no_accumulate) cfg.accumulate = false;
  const Scenario sc = load_scenario(opt.scenario_path);
  const bool keep_traces = !opt.trace_dir.empty();
  const SuiteResult res = run_suite(sc, cfg, opt.parallelism, keep_traces);

  const std::string text = results_to_string(res);
  if (opt.out_path.empty() || opt.out_path == "-") std::cout << text;
  else write_file(opt.out_path, text);

  if (keep_traces) {
    std::filesystem::create_directories(opt.trace_dir);
    for (std::size_t i = 0; i < res.traces.size(); ++i) {
      if (!res.records[i].ok) continue;
      std::ofstream f(opt.trace_dir + "/" + res.records[i].id + ".trace");
      write_trace(f, res.traces[i], sc.grid);
    }
  }
  std::cerr << "episodes=" << res.summary.episodes << " errors=" << res.summary.errors
            << " SR=" << fmt_f(res.summary.sr) << " SPL=" << fmt_f(res.summary.spl) << '\n';
  return res.summary.errors == 0 ? 0 : 2;
}

int cmd_sweep_gamma(const CliOptions& opt, const CLI::App* cmd) {
  RunConfig cfg = build_config(opt, cmd);
  const Scenario sc = load_scenario(opt.scenario_path);
  const auto pts = sweep_gamma(sc, cfg, parse_value_list(opt.gamma_values), opt.parallelism);
  std::ostringstream os;
  write_gamma_sweep(os, pts);
  if (opt.out_path.empty() || opt.out_path == "-") std::cout << os.str();
  else write_file(opt.out_path, os.str());
  return 0;
}

int cmd_eval_waypoints(const CliOptions& opt, const CLI::App* cmd) {
  RunConfig cfg = build_config(opt, cmd);
  const Scenario sc = load_scenario(opt.scenario_path);
  HeatmapConfig hm;
  hm.angular_bins = cfg.angular_bins;
  hm.radial_bins = cfg.radial_bins;
  hm.radial_step = cfg.radial_step;
  const double chassis = cfg.chassis_override.value_or(sc.regime.chassis_radius);
  hm.margin = 2.0 * chassis;

  std::ostringstream os;
  int sets = 0;
  double sum_cd = 0.0, sum_open = 0.0, sum_chamfer = 0.0, sum_hausdorff = 0.0;
  for (const auto& ep : sc.episodes) {
    for (const auto& set : ep.ref_waypoints) {
      AgentState state{set.pose.position, wrap360(set.pose.heading_deg), chassis};
      const RangeScan scan = panoramic_scan(sc.grid, state, cfg.scan_rays, cfg.scan_max_range);
      const PolarHeatmap heat = build_heatmap(scan, hm);
      const auto wps = predict_waypoints(heat, cfg.waypoint_k, cfg.nms_angle_deg, cfg.nms_radius_m);
      std::vector<Vec2> predicted;
      for (const auto& wp : wps) predicted.push_back(waypoint_world_position(state, wp));
      const WaypointEval ev = evaluate_waypoints(predicted, set.points, sc.grid, state);
      os << "waypoint-eval: episode=" << ep.id << " pose=" << fmt_pose(set.pose)
         << " predicted=" << predicted.size() << " count_diff=" << ev.count_diff
         << " open=" << fmt_f(ev.percent_open) << " chamfer=" << fmt_f(ev.chamfer)
         << " hausdorff=" << fmt_f(ev.hausdorff) << '\n';
      ++sets;
      sum_cd += ev.count_diff;
      sum_open += ev.percent_open;
      sum_chamfer += ev.chamfer;
      sum_hausdorff += ev.hausdorff;
    }
  }
  if (sets == 0) throw ScenarioError(opt.scenario_path + ": no refwp records to evaluate");
  os << "waypoint-summary: sets=" << sets << " count_diff=" << fmt_f(sum_cd / sets)
     << " open=" << fmt_f(sum_open / sets) << " chamfer=" << fmt_f(sum_chamfer / sets)
     << " hausdorff=" << fmt_f(sum_hausdorff / sets) << '\n';
  if (opt.out_path.empty() || opt.out_path == "-") std::cout << os.str();
  else write_file(opt.out_path, os.str());
  return 0;
}

int cmd_plot(const std::string& trace_path, const std::string& out_path) {
  const LoadedTrace lt = load_trace(trace_path);
  std::ostringstream os;
  write_svg(os, lt);
  write_file(out_path, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toponav: topological navigation simulator"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string trace_path, plot_out;
  bool no_delete = false, no_accumulate = false;

  CLI::App* run = app.add_subcommand("run", "run a scenario suite and write per-episode results");
  run->add_option("--scenario", opt.scenario_path, "scenario file")->required();
  run->add_option("--policy", opt.policy, "teacher_r2r|teacher_rxr|gasa|random");
  run->add_option("--gamma", opt.gamma, "waypoint localization threshold (m)");
  run->add_option("--sliding", opt.sliding, "allowed|forbidden (override scenario)");
  run->add_option("--tryout", opt.tryout, "on|off");
  run->add_option("--seed", opt.seed, "rng seed");
  run->add_option("--out", opt.out_path, "results file ('-' for stdout)");
  run->add_option("--k", opt.k, "waypoints per step");
  run->add_option("--select", opt.select, "argmax|sample (gasa policy)");
  run->add_option("--ne", opt.ne, "geodesic|euclidean navigation error");
  run->add_option("--weights", opt.weights, "gasa weights file");
  run->add_option("--chassis", opt.chassis, "chassis radius override (m)");
  run->add_option("--config", opt.config_path, "config file");
  run->add_option("--parallelism", opt.parallelism, "worker threads");
  run->add_option("--trace-dir", opt.trace_dir, "write per-episode trace files here");
  run->add_flag("--no-delete", no_delete, "disable ghost deletion (ablation)");
  run->add_flag("--no-accumulate", no_accumulate, "disable waypoint accumulation (ablation)");

  CLI::App* sweep = app.add_subcommand("sweep-gamma", "rerun the suite across gamma values");
  sweep->add_option("--scenario", opt.scenario_path, "scenario file")->required();
  sweep->add_option("--values", opt.gamma_values, "comma-separated gamma list");
  sweep->add_option("--policy", opt.policy, "goal policy");
  sweep->add_option("--seed", opt.seed, "rng seed");
  sweep->add_option("--out", opt.out_path, "output file ('-' for stdout)");
  sweep->add_option("--config", opt.config_path, "config file");
  sweep->add_option("--parallelism", opt.parallelism, "worker threads");
  sweep->add_option("--tryout", opt.tryout, "on|off");

  CLI::App* evalwp = app.add_subcommand("eval-waypoints", "waypoint metrics against reference sets");
  evalwp->add_option("--scenario", opt.scenario_path, "scenario file with refwp records")->required();
  evalwp->add_option("--k", opt.k, "waypoints per step");
  evalwp->add_option("--out", opt.out_path, "output file ('-' for stdout)");
  evalwp->add_option("--config", opt.config_path, "config file");
  evalwp->add_option("--chassis", opt.chassis, "chassis radius override (m)");

  CLI::App* plot = app.add_subcommand("plot", "render a trace file to SVG");
  plot->add_option("--trace", trace_path, "episode trace file")->required();
  plot->add_option("--out", plot_out, "output SVG path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(opt, run, no_delete, no_accumulate);
    if (sweep->parsed()) return cmd_sweep_gamma(opt, sweep);
    if (evalwp->parsed()) return cmd_eval_waypoints(opt, evalwp);
    if (plot->parsed()) return cmd_plot(trace_path, plot_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
