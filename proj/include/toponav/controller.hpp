#pragma once

#include <cmath>
#include <vector>

#include "toponav/world.hpp"

namespace toponav {

struct TraceEntry {
  Action action = Action::Forward;
  Pose pose_after;
  bool collided = false;
};

struct TryoutEvent {
  int action_index = 0;   // index of the attempt's FORWARD in the trace
  double offset_deg = 0.0;
  bool escaped = false;
};

struct ControlTrace {
  std::vector<TraceEntry> entries;
  std::vector<TryoutEvent> tryout_events;

  long actions() const { return static_cast<long>(entries.size()); }
  long rotations() const {
    long n = 0;
    for (const auto& e : entries)
      if (e.action == Action::RotateLeft || e.action == Action::RotateRight) ++n;
    return n;
  }
  long collisions() const {
    long n = 0;
    for (const auto& e : entries)
      if (e.collided) ++n;
    return n;
  }
};

// Quantizes a relative pose into rotate-then-forward actions:
// round(|dtheta|/15) rotations followed by round(drho/0.25) forwards,
// rounding half away from zero.
inline std::vector<Action> rf_translate(double dtheta_deg, double drho_m) {
  std::vector<Action> actions;
  const long rotations = std::lround(std::fabs(dtheta_deg) / kRotateStep);
  const Action rot = dtheta_deg > 0.0 ? Action::RotateLeft : Action::RotateRight;
  for (long i = 0; i < rotations; ++i) actions.push_back(rot);
  const long forwards = std::lround(drho_m / kForwardStep);
  for (long i = 0; i < forwards; ++i) actions.push_back(Action::Forward);
  return actions;
}

namespace detail {

inline AgentState run_action(const OccupancyGrid& g, const AgentState& s, Action a,
                             Sliding sliding, ControlTrace& trace, long& budget) {
  const StepResult r = step(g, s, a, sliding);
  trace.entries.push_back({a, {r.state.position, r.state.heading_deg}, r.collided});
  --budget;
  return r.state;
}

// Rotate from the current heading to target (shortest way, 15-degree steps).
inline AgentState rotate_to(const OccupancyGrid& g, AgentState s, double target_heading,
                            Sliding sliding, ControlTrace& trace, long& budget) {
  const double delta = wrap180(target_heading - s.heading_deg);
  const long n = std::lround(std::fabs(delta) / kRotateStep);
  const Action rot = delta > 0.0 ? Action::RotateLeft : Action::RotateRight;
  for (long i = 0; i < n && budget > 0; ++i) s = run_action(g, s, rot, sliding, trace, budget);
  return s;
}

}  // namespace detail

struct TryoutResult {
  AgentState state;
  bool escaped = false;
};

// Trial-and-error deadlock escape. Invoked after a FORWARD left the position
// unchanged: tries offset headings +-30, +-60, +-90 (0 just failed) with a
// single FORWARD each; on escape the agent returns to its original heading so
// the remaining FORWARD flow can continue.
inline TryoutResult tryout(const OccupancyGrid& g, AgentState state, Sliding sliding,
                           ControlTrace& trace, long& budget) {
  static constexpr double kOffsets[6] = {30.0, -30.0, 60.0, -60.0, 90.0, -90.0};
  const double home = state.heading_deg;
  for (const double offset : kOffsets) {
    if (budget <= 0) break;
    state = detail::rotate_to(g, state, wrap360(home + offset), sliding, trace, budget);
    if (budget <= 0) break;
    const Vec2 before = state.position;
    state = detail::run_action(g, state, Action::Forward, sliding, trace, budget);
    const bool moved = state.position != before;
    trace.tryout_events.push_back({static_cast<int>(trace.entries.size()) - 1, offset, moved});
    if (moved) {
      state = detail::rotate_to(g, state, home, sliding, trace, budget);
      return {state, true};
    }
  }
  state = detail::rotate_to(g, state, home, sliding, trace, budget);
  return {state, false};
}

struct ExecResult {
  AgentState state;
  ControlTrace trace;
};

// Executes a topological plan subgoal by subgoal. (dtheta, drho) is computed
// once per subgoal; a zero-displacement FORWARD triggers Tryout when enabled,
// and a failed Tryout abandons the current subgoal.
inline ExecResult execute_plan(const OccupancyGrid& g, AgentState state,
                               const std::vector<Vec2>& plan, Sliding sliding,
                               bool tryout_enabled, long max_actions = 500) {
  ExecResult out;
  long budget = max_actions;
  for (const Vec2& subgoal : plan) {
    if (budget <= 0) break;
    const double drho = distance(state.position, subgoal);
    if (drho < 1e-9) continue;
    const double dtheta = wrap180(bearing_deg(state.position, subgoal) - state.heading_deg);

    const long rotations = std::lround(std::fabs(dtheta) / kRotateStep);
    const Action rot = dtheta > 0.0 ? Action::RotateLeft : Action::RotateRight;
    for (long i = 0; i < rotations && budget > 0; ++i)
      state = detail::run_action(g, state, rot, sliding, out.trace, budget);

    const long forwards = std::lround(drho / kForwardStep);
    bool abandoned = false;
    for (long i = 0; i < forwards && budget > 0 && !abandoned; ++i) {
      const Vec2 before = state.position;
      state = detail::run_action(g, state, Action::Forward, sliding, out.trace, budget);
      if (state.position == before && tryout_enabled && budget > 0) {
        const TryoutResult tr = tryout(g, state, sliding, out.trace, budget);
        state = tr.state;
        if (!tr.escaped) abandoned = true;  // next plan node, if any
      }
    }
  }
  out.state = state;
  return out;
}

}  // namespace toponav
