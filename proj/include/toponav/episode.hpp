#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "toponav/controller.hpp"
#include "toponav/metrics.hpp"
#include "toponav/planner.hpp"
#include "toponav/scenario.hpp"
#include "toponav/topomap.hpp"
#include "toponav/trace.hpp"
#include "toponav/waypoint.hpp"

namespace toponav {

enum class Policy { TeacherR2R, TeacherRxR, Gasa, Random, Custom };

inline const char* policy_name(Policy p) {
  switch (p) {
    case Policy::TeacherR2R: return "teacher_r2r";
    case Policy::TeacherRxR: return "teacher_rxr";
    case Policy::Gasa: return "gasa";
    case Policy::Random: return "random";
    case Policy::Custom: return "custom";
  }
  return "custom";
}

inline std::optional<Policy> parse_policy(const std::string& s) {
  if (s == "teacher_r2r") return Policy::TeacherR2R;
  if (s == "teacher_rxr") return Policy::TeacherRxR;
  if (s == "gasa") return Policy::Gasa;
  if (s == "random") return Policy::Random;
  return std::nullopt;
}

// Context handed to a custom goal scorer (test hook for scripted policies).
struct PolicyContext {
  const TopoGraph* graph = nullptr;
  const OccupancyGrid* grid = nullptr;
  Vec2 agent_position;
  Vec2 goal;
  int step = 0;
};

using CustomScorer = std::function<int(const PolicyContext&)>;

struct RunConfig {
  double gamma = 0.50;             // waypoint localization threshold
  int waypoint_k = 5;
  double nms_angle_deg = 30.0;
  double nms_radius_m = 0.5;
  int scan_rays = 120;
  double scan_max_range = 5.0;
  int angular_bins = 120;
  int radial_bins = 12;
  double radial_step = 0.25;
  int descriptor_buckets = 8;
  double success_radius = 3.0;
  double teacher_stop_radius = 3.0;
  double subgoal_visit_radius = 1.5;
  int max_goal_predictions = 0;    // 0: take the scenario regime value
  long action_budget = 5000;       // per-episode low-level safety bound
  long max_actions_per_plan = 500;
  bool tryout = true;
  bool ghost_deletion = true;      // Del. ablation toggle
  bool accumulate = true;          // Acc. ablation toggle
  std::optional<Sliding> sliding_override;
  std::optional<double> chassis_override;
  std::uint64_t seed = 1;
  Policy policy = Policy::TeacherR2R;
  SelectMode select_mode = SelectMode::Argmax;
  DistanceMode ne_mode = DistanceMode::Geodesic;
  int gasa_att_dim = 16;
  int gasa_out_dim = 16;
  int ffn_hidden = 16;
  std::string weights_path;        // optional GasaWeights file; empty = seeded init
  CustomScorer custom_scorer;      // used when policy == Custom
};

struct EpisodeRecord {
  std::string id;
  bool ok = true;
  std::string error;
  EpisodeResult metrics;
  int decision_steps = 0;
  bool stopped = false;        // terminated by a STOP decision
  int node_count = 0;          // final map size (stop node excluded)
  long tryout_attempts = 0;
  long tryout_escapes = 0;
  std::vector<int> goal_ids;   // chosen goal per decision step, kStopId for STOP
};

struct EpisodeOutcome {
  EpisodeRecord record;
  EpisodeTrace trace;
};

// One mapping-planning-control episode:
//   scan -> predict waypoints -> map update -> goal selection -> ghost
//   deletion -> Dijkstra plan -> RF control, until STOP, the goal-prediction
//   cap or the action budget.
inline EpisodeOutcome run_episode(const Scenario& sc, const EpisodeSpec& ep,
                                  const RunConfig& cfg, const GasaWeights* weights = nullptr) {
  const OccupancyGrid& grid = sc.grid;
  Regime regime = sc.regime;
  if (cfg.sliding_override) regime.sliding = *cfg.sliding_override;
  if (cfg.chassis_override) regime.chassis_radius = *cfg.chassis_override;
  const int max_goals =
      cfg.max_goal_predictions > 0 ? cfg.max_goal_predictions : regime.max_goal_predictions;

  AgentState state{ep.start.position, wrap360(ep.start.heading_deg), regime.chassis_radius};
  if (!grid.disc_free(state.position, state.chassis_radius))
    throw ScenarioError("episode " + ep.id + ": start occluded for chassis radius " +
                        fmt_g(state.chassis_radius));

  EpisodeOutcome out;
  out.record.id = ep.id;
  out.trace.episode_id = ep.id;
  out.trace.seed = cfg.seed;
  out.trace.policy = policy_name(cfg.policy);
  out.trace.sliding = regime.sliding;
  out.trace.chassis_radius = regime.chassis_radius;
  out.trace.gamma = cfg.gamma;
  out.trace.start = ep.start;
  out.trace.goal = ep.goal;
  out.trace.reference = ep.reference;

  HeatmapConfig hm_cfg;
  hm_cfg.angular_bins = cfg.angular_bins;
  hm_cfg.radial_bins = cfg.radial_bins;
  hm_cfg.radial_step = cfg.radial_step;
  hm_cfg.margin = 2.0 * regime.chassis_radius;

  std::mt19937_64 rng(cfg.seed);
  TopoGraph graph;

  // Teacher machinery: geodesic fields from the target / reference subgoals,
  // inflated by the chassis radius so the demonstrator reasons over space the
  // agent can traverse.
  std::unique_ptr<GeodesicField> target_field;
  std::vector<std::unique_ptr<GeodesicField>> subgoal_fields;
  std::vector<bool> subgoal_visited;
  if (cfg.policy == Policy::TeacherR2R) {
    target_field = std::make_unique<GeodesicField>(grid, ep.goal, regime.chassis_radius);
  } else if (cfg.policy == Policy::TeacherRxR) {
    for (const auto& p : ep.reference)
      subgoal_fields.push_back(std::make_unique<GeodesicField>(grid, p, regime.chassis_radius));
    subgoal_visited.assign(ep.reference.size(), false);
  }

  std::vector<Vec2> path_points{state.position};
  TraceStats stats;
  long budget = cfg.action_budget;

  for (int t = 1; t <= max_goals; ++t) {
    const RangeScan scan = panoramic_scan(grid, state, cfg.scan_rays, cfg.scan_max_range);
    const PolarHeatmap heat = build_heatmap(scan, hm_cfg);
    auto wps = predict_waypoints(heat, cfg.waypoint_k, cfg.nms_angle_deg, cfg.nms_radius_m);

    std::vector<PlacedWaypoint> placed;
    placed.reserve(wps.size());
    for (auto& wp : wps) {
      wp.descriptor = sector_descriptor(scan, wp.rel_heading_deg, 30.0, cfg.descriptor_buckets);
      wp.source_step = t;
      placed.push_back({waypoint_world_position(state, wp), wp.descriptor});
    }
    const auto pano = panorama_descriptor(scan, cfg.descriptor_buckets);
    const UpdateReport rep = graph.update(state.position, pano, placed, t, cfg.gamma, cfg.accumulate);

    DecisionRecord rec;
    rec.step = t;
    rec.pose = {state.position, state.heading_deg};
    rec.current_reused = rep.current_reused;
    for (const auto& p : placed) rec.waypoints.push_back(p.position);
    snapshot_graph(graph, rec);

    int chosen = kStopId;
    switch (cfg.policy) {
      case Policy::TeacherR2R:
        chosen = teacher_goal_r2r(graph, *target_field, ep.goal, state.position,
                                  cfg.teacher_stop_radius);
        break;
      case Policy::TeacherRxR: {
        std::vector<const GeodesicField*> fields;
        fields.reserve(subgoal_fields.size());
        for (const auto& f : subgoal_fields) fields.push_back(f.get());
        chosen = teacher_goal_rxr(graph, fields, ep.reference, subgoal_visited, state.position,
                                  cfg.subgoal_visit_radius, cfg.teacher_stop_radius);
        break;
      }
      case Policy::Gasa: {
        if (weights == nullptr) throw std::invalid_argument("run_episode: gasa policy needs weights");
        const EncodedGraph enc = encode_graph(graph, state.heading_deg, cfg.descriptor_buckets);
        const auto scores = score_nodes(enc, *weights);
        chosen = select_goal(enc.ids, scores, cfg.select_mode, rng);
        break;
      }
      case Policy::Random: {
        auto ghosts = graph.ghost_ids();
        const std::size_t n = ghosts.size() + 1;  // ghosts plus stop
        const std::size_t pick = static_cast<std::size_t>(canonical(rng) * n);
        chosen = pick == 0 ? kStopId : ghosts[pick - 1];
        break;
      }
      case Policy::Custom: {
        if (!cfg.custom_scorer) throw std::invalid_argument("run_episode: custom policy needs a scorer");
        PolicyContext ctx{&graph, &grid, state.position, ep.goal, t};
        chosen = cfg.custom_scorer(ctx);
        break;
      }
    }
    rec.chosen = chosen;
    out.record.goal_ids.push_back(chosen);
    out.record.decision_steps = t;

    if (chosen == kStopId) {
      out.trace.decisions.push_back(std::move(rec));
      out.record.stopped = true;
      break;
    }

    // Plan to the ghost, then delete it from the map before control.
    const Plan plan = plan_path(graph, graph.current_id(), chosen);
    const Vec2 goal_pos = graph.node(chosen).position;
    rec.plan_points = plan.points;
    if (cfg.ghost_deletion) graph.delete_ghost(chosen);

    ExecResult exec = execute_plan(grid, state, plan.points, regime.sliding, cfg.tryout,
                                   std::min(cfg.max_actions_per_plan, budget));
    state = exec.state;
    budget -= exec.trace.actions();
    for (const auto& e : exec.trace.entries) path_points.push_back(e.pose_after.position);
    stats.actions += exec.trace.actions();
    stats.rotations += exec.trace.rotations();
    stats.collisions += exec.trace.collisions();
    stats.subgoal_pairs.push_back({state.position, goal_pos});
    out.record.tryout_attempts += static_cast<long>(exec.trace.tryout_events.size());
    for (const auto& ev : exec.trace.tryout_events)
      if (ev.escaped) ++out.record.tryout_escapes;
    rec.acts = std::move(exec.trace.entries);
    rec.tryouts = std::move(exec.trace.tryout_events);
    out.trace.decisions.push_back(std::move(rec));

    if (budget <= 0) break;
  }

  out.record.node_count = static_cast<int>(graph.size());
  out.record.metrics =
      episode_metrics(path_points, grid, ep.start.position, ep.goal, ep.reference, stats,
                      cfg.success_radius, cfg.ne_mode, regime.chassis_radius);
  return out;
}

}  // namespace toponav
