#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "toponav/controller.hpp"
#include "toponav/planner.hpp"
#include "toponav/scenario.hpp"
#include "toponav/topomap.hpp"
#include "toponav/waypoint.hpp"

namespace toponav {

struct SnapshotNode {
  int id = 0;
  NodeKind kind = NodeKind::Ghost;
  Vec2 position;
  int accum_count = 1;
  int last_visit_step = 0;
};

struct SnapshotEdge {
  int a = 0;
  int b = 0;
  double length = 0.0;
};

// One decision-loop record: pose, predicted waypoints, the post-update graph,
// the chosen goal, the extracted plan and the control actions that followed.
struct DecisionRecord {
  int step = 0;
  Pose pose;
  std::vector<Vec2> waypoints;  // world frame
  std::vector<SnapshotNode> nodes;
  std::vector<SnapshotEdge> edges;
  int chosen = kStopId;
  bool current_reused = false;
  std::vector<Vec2> plan_points;
  std::vector<TraceEntry> acts;
  std::vector<TryoutEvent> tryouts;
};

struct EpisodeTrace {
  std::string episode_id;
  std::uint64_t seed = 0;
  std::string policy;
  Sliding sliding = Sliding::Allowed;
  double chassis_radius = 0.10;
  double gamma = 0.5;
  Pose start;
  Vec2 goal;
  std::vector<Vec2> reference;
  std::vector<DecisionRecord> decisions;
};

inline void snapshot_graph(const TopoGraph& g, DecisionRecord& rec) {
  for (const auto& [id, n] : g.nodes())
    rec.nodes.push_back({id, n.kind, n.position, n.accum_count, n.last_visit_step});
  for (const auto& [key, len] : g.edges()) rec.edges.push_back({key.first, key.second, len});
}

inline const char* kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Visited: return "visited";
    case NodeKind::Current: return "current";
    case NodeKind::Ghost: return "ghost";
  }
  return "ghost";
}

inline void write_trace(std::ostream& os, const EpisodeTrace& tr, const OccupancyGrid& grid) {
  os << "trace: episode=" << tr.episode_id << " seed=" << tr.seed << " policy=" << tr.policy
     << " sliding=" << (tr.sliding == Sliding::Allowed ? "allowed" : "forbidden")
     << " chassis=" << fmt_g(tr.chassis_radius) << " gamma=" << fmt_g(tr.gamma) << '\n';
  os << "resolution: " << fmt_g(grid.resolution()) << '\n';
  os << "origin: " << fmt_g(grid.origin().x) << ' ' << fmt_g(grid.origin().y) << '\n';
  os << "start: " << fmt_pose(tr.start) << '\n';
  os << "goal: " << fmt_point(tr.goal) << '\n';
  os << "ref: ";
  for (std::size_t i = 0; i < tr.reference.size(); ++i)
    os << (i ? " " : "") << fmt_point(tr.reference[i]);
  os << '\n';
  os << "grid:\n";
  for (const auto& row : grid.to_ascii()) os << row << '\n';
  os << "end\n";

  for (const auto& d : tr.decisions) {
    os << "step: t=" << d.step << " pose=" << fmt_f(d.pose.position.x) << ','
       << fmt_f(d.pose.position.y) << ',' << fmt_f(d.pose.heading_deg) << '\n';
    for (const auto& w : d.waypoints)
      os << "wp: t=" << d.step << " pos=" << fmt_f(w.x) << ',' << fmt_f(w.y) << '\n';
    for (const auto& n : d.nodes)
      os << "node: t=" << d.step << " id=" << n.id << " kind=" << kind_name(n.kind)
         << " pos=" << fmt_f(n.position.x) << ',' << fmt_f(n.position.y)
         << " accum=" << n.accum_count << " visit=" << n.last_visit_step << '\n';
    for (const auto& e : d.edges)
      os << "edge: t=" << d.step << " a=" << e.a << " b=" << e.b << " len=" << fmt_f(e.length)
         << '\n';
    os << "choice: t=" << d.step << " goal=";
    if (d.chosen == kStopId) os << "STOP";
    else os << d.chosen;
    os << " reused=" << (d.current_reused ? 1 : 0) << '\n';
    if (!d.plan_points.empty()) {
      os << "plan: t=" << d.step << " points=";
      for (std::size_t i = 0; i < d.plan_points.size(); ++i)
        os << (i ? " " : "") << fmt_f(d.plan_points[i].x) << ',' << fmt_f(d.plan_points[i].y);
      os << '\n';
    }
    for (const auto& a : d.acts) {
      const char kind = a.action == Action::Forward ? 'F'
                        : a.action == Action::RotateLeft ? 'L'
                        : a.action == Action::RotateRight ? 'R' : 'S';
      os << "act: t=" << d.step << " kind=" << kind << " pose=" << fmt_f(a.pose_after.position.x)
         << ',' << fmt_f(a.pose_after.position.y) << ',' << fmt_f(a.pose_after.heading_deg)
         << " col=" << (a.collided ? 1 : 0) << '\n';
    }
    for (const auto& t : d.tryouts)
      os << "try: t=" << d.step << " idx=" << t.action_index << " off=" << fmt_g(t.offset_deg)
         << " esc=" << (t.escaped ? 1 : 0) << '\n';
  }
}

struct LoadedTrace {
  OccupancyGrid grid;
  EpisodeTrace trace;
};

// Parses what write_trace emits; enough fidelity for plotting and replay
// inspection.
inline LoadedTrace load_trace(std::istream& is, const std::string& source = "trace") {
  LoadedTrace out;
  double resolution = 0.05;
  Vec2 origin{0.0, 0.0};
  std::string line;
  int lineno = 0;
  auto ctx = [&](const std::string& what) {
    return source + ":" + std::to_string(lineno) + ": " + what;
  };
  auto rec_for = [&](int t) -> DecisionRecord& {
    if (out.trace.decisions.empty() || out.trace.decisions.back().step != t) {
      DecisionRecord r;
      r.step = t;
      out.trace.decisions.push_back(r);
    }
    return out.trace.decisions.back();
  };

  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw ParseError(ctx("expected 'key: value'"));
    const std::string key = t.substr(0, colon);
    const std::string value = trim(t.substr(colon + 1));

    if (key == "trace") {
      for (const auto& f : parse_fields(value, ctx("trace"))) {
        if (f.key == "episode") out.trace.episode_id = f.value;
        else if (f.key == "seed") out.trace.seed = parse_u64(f.value, ctx("seed"));
        else if (f.key == "policy") out.trace.policy = f.value;
        else if (f.key == "sliding")
          out.trace.sliding = f.value == "forbidden" ? Sliding::Forbidden : Sliding::Allowed;
        else if (f.key == "chassis") out.trace.chassis_radius = parse_double(f.value, ctx("chassis"));
        else if (f.key == "gamma") out.trace.gamma = parse_double(f.value, ctx("gamma"));
      }
    } else if (key == "resolution") {
      resolution = parse_double(value, ctx("resolution"));
    } else if (key == "origin") {
      const auto parts = split_ws(value);
      if (parts.size() != 2) throw ParseError(ctx("origin expects 'x y'"));
      origin = {parse_double(parts[0], ctx("origin")), parse_double(parts[1], ctx("origin"))};
    } else if (key == "start") {
      out.trace.start = parse_pose(value, ctx("start"));
    } else if (key == "goal") {
      out.trace.goal = parse_point(value, ctx("goal"));
    } else if (key == "ref") {
      out.trace.reference = parse_point_list(value, ctx("ref"));
    } else if (key == "grid") {
      std::vector<std::string> rows;
      while (std::getline(is, line)) {
        ++lineno;
        if (trim(line) == "end") break;
        rows.push_back(line);
      }
      out.grid = OccupancyGrid::from_ascii(rows, resolution, origin);
    } else if (key == "step" || key == "wp" || key == "node" || key == "edge" ||
               key == "choice" || key == "plan" || key == "act" || key == "try") {
      const auto fields = parse_fields(value, ctx(key));
      int step = 0;
      for (const auto& f : fields)
        if (f.key == "t") step = static_cast<int>(parse_long(f.value, ctx("t")));
      DecisionRecord& rec = rec_for(step);
      if (key == "step") {
        for (const auto& f : fields)
          if (f.key == "pose") rec.pose = parse_pose(f.value, ctx("pose"));
      } else if (key == "wp") {
        for (const auto& f : fields)
          if (f.key == "pos") rec.waypoints.push_back(parse_point(f.value, ctx("pos")));
      } else if (key == "node") {
        SnapshotNode n;
        for (const auto& f : fields) {
          if (f.key == "id") n.id = static_cast<int>(parse_long(f.value, ctx("id")));
          else if (f.key == "kind")
            n.kind = f.value == "visited" ? NodeKind::Visited
                     : f.value == "current" ? NodeKind::Current : NodeKind::Ghost;
          else if (f.key == "pos") n.position = parse_point(f.value, ctx("pos"));
          else if (f.key == "accum") n.accum_count = static_cast<int>(parse_long(f.value, ctx("accum")));
          else if (f.key == "visit") n.last_visit_step = static_cast<int>(parse_long(f.value, ctx("visit")));
        }
        rec.nodes.push_back(n);
      } else if (key == "edge") {
        SnapshotEdge e;
        for (const auto& f : fields) {
          if (f.key == "a") e.a = static_cast<int>(parse_long(f.value, ctx("a")));
          else if (f.key == "b") e.b = static_cast<int>(parse_long(f.value, ctx("b")));
          else if (f.key == "len") e.length = parse_double(f.value, ctx("len"));
        }
        rec.edges.push_back(e);
      } else if (key == "choice") {
        for (const auto& f : fields) {
          if (f.key == "goal")
            rec.chosen = f.value == "STOP" ? kStopId : static_cast<int>(parse_long(f.value, ctx("goal")));
          else if (f.key == "reused") rec.current_reused = f.value == "1";
        }
      } else if (key == "plan") {
        for (const auto& f : fields)
          if (f.key == "points") rec.plan_points = parse_point_list(f.value, ctx("points"));
      } else if (key == "act") {
        TraceEntry a;
        for (const auto& f : fields) {
          if (f.key == "kind")
            a.action = f.value == "F" ? Action::Forward
                       : f.value == "L" ? Action::RotateLeft
                       : f.value == "R" ? Action::RotateRight : Action::Stop;
          else if (f.key == "pose") {
            const Pose p = parse_pose(f.value, ctx("pose"));
            a.pose_after = p;
          } else if (f.key == "col") a.collided = f.value == "1";
        }
        rec.acts.push_back(a);
      } else {  // try
        TryoutEvent ev;
        for (const auto& f : fields) {
          if (f.key == "idx") ev.action_index = static_cast<int>(parse_long(f.value, ctx("idx")));
          else if (f.key == "off") ev.offset_deg = parse_double(f.value, ctx("off"));
          else if (f.key == "esc") ev.escaped = f.value == "1";
        }
        rec.tryouts.push_back(ev);
      }
    } else {
      throw ParseError(ctx("unknown record '" + key + "'"));
    }
  }
  if (out.grid.width() == 0) throw ParseError(source + ": missing grid");
  return out;
}

inline LoadedTrace load_trace(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open trace file: " + path);
  return load_trace(f, path);
}

}  // namespace toponav
