#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "toponav/mat.hpp"
#include "toponav/rng.hpp"
#include "toponav/topomap.hpp"
#include "toponav/world.hpp"

namespace toponav {

// Sentinel id for the stop node / STOP decision.
constexpr int kStopId = -1;

constexpr double kMaskedScore = -std::numeric_limits<double>::infinity();

// Graph-side planner weights: single-head attention with a scalar spatial
// bias weight, plus a two-layer FFN scoring head. Text is flat decimal,
// header line per block, deterministic round-trip.
struct GasaWeights {
  Mat w_q, w_k, w_v;    // d_in x d_att, d_in x d_att, d_in x d_out
  double w_e = 0.0;     // scalar map applied to the spatial matrix
  Mat ffn_w1;           // d_out x hidden
  std::vector<double> ffn_b1;
  Mat ffn_w2;           // hidden x 1
  double ffn_b2 = 0.0;

  static GasaWeights seeded(int d_in, int d_att, int d_out, int hidden, std::uint64_t seed) {
    GaussianStream gs(seed);
    auto fill = [&gs](Mat& m, int r, int c) {
      m = Mat(r, c);
      const double scale = 1.0 / std::sqrt(static_cast<double>(r));
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = gs.next() * scale;
    };
    GasaWeights w;
    fill(w.w_q, d_in, d_att);
    fill(w.w_k, d_in, d_att);
    fill(w.w_v, d_in, d_out);
    w.w_e = -std::fabs(gs.next());  // nearer nodes get larger bias
    fill(w.ffn_w1, d_out, hidden);
    w.ffn_b1.assign(static_cast<std::size_t>(hidden), 0.0);
    for (auto& b : w.ffn_b1) b = gs.next() * 0.1;
    fill(w.ffn_w2, hidden, 1);
    w.ffn_b2 = gs.next() * 0.1;
    return w;
  }

  void save(std::ostream& os) const {
    os.precision(17);
    auto put = [&os](const char* name, const Mat& m) {
      os << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
      for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
        os << '\n';
      }
    };
    os << "gasa-weights v1\n";
    put("wq", w_q);
    put("wk", w_k);
    put("wv", w_v);
    os << "we 1 1\n" << w_e << '\n';
    put("ffn1", ffn_w1);
    os << "b1 1 " << ffn_b1.size() << '\n';
    for (std::size_t i = 0; i < ffn_b1.size(); ++i) os << (i ? " " : "") << ffn_b1[i];
    os << '\n';
    put("ffn2", ffn_w2);
    os << "b2 1 1\n" << ffn_b2 << '\n';
  }

  static GasaWeights load(std::istream& is) {
    std::string magic, version;
    is >> magic >> version;
    if (magic != "gasa-weights" || version != "v1")
      throw std::invalid_argument("weights: bad header");
    auto get = [&is](const char* want) {
      std::string name;
      int r = 0, c = 0;
      is >> name >> r >> c;
      if (!is || name != want || r <= 0 || c <= 0)
        throw std::invalid_argument(std::string("weights: bad block ") + want);
      Mat m(r, c);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
          if (!(is >> m(i, j))) throw std::invalid_argument("weights: truncated values");
      return m;
    };
    GasaWeights w;
    w.w_q = get("wq");
    w.w_k = get("wk");
    w.w_v = get("wv");
    w.w_e = get("we")(0, 0);
    w.ffn_w1 = get("ffn1");
    const Mat b1 = get("b1");
    w.ffn_b1.assign(b1.data().begin(), b1.data().end());
    w.ffn_w2 = get("ffn2");
    w.ffn_b2 = get("b2")(0, 0);
    return w;
  }
};

// Graph-aware self-attention:
//   softmax(X Wq (X Wk)^T / sqrt(d) + E * we) X Wv
// The spatial term biases attention toward topologically near nodes.
inline Mat gasa_forward(const Mat& x, const Mat& e, const GasaWeights& w) {
  if (x.cols() != w.w_q.rows() || x.cols() != w.w_k.rows() || x.cols() != w.w_v.rows())
    throw std::invalid_argument("gasa_forward: encoding width does not match weights");
  if (e.rows() != x.rows() || e.cols() != x.rows())
    throw std::invalid_argument("gasa_forward: spatial matrix shape mismatch");
  const Mat q = x * w.w_q;
  const Mat k = x * w.w_k;
  Mat scores = q * k.transposed();
  const double scale = 1.0 / std::sqrt(static_cast<double>(w.w_q.cols()));
  for (int i = 0; i < scores.rows(); ++i)
    for (int j = 0; j < scores.cols(); ++j) scores(i, j) = scores(i, j) * scale + e(i, j) * w.w_e;
  softmax_rows(scores);
  return scores * (x * w.w_v);
}

// Attention weights only; exposed for the row-sum invariant checks.
inline Mat gasa_attention(const Mat& x, const Mat& e, const GasaWeights& w) {
  const Mat q = x * w.w_q;
  const Mat k = x * w.w_k;
  Mat scores = q * k.transposed();
  const double scale = 1.0 / std::sqrt(static_cast<double>(w.w_q.cols()));
  for (int i = 0; i < scores.rows(); ++i)
    for (int j = 0; j < scores.cols(); ++j) scores(i, j) = scores(i, j) * scale + e(i, j) * w.w_e;
  softmax_rows(scores);
  return scores;
}

// Node features for the graph encoder: descriptor, pose encoding relative to
// the agent (cos, sin of the bearing offset plus Euclidean distance) and the
// navigation step encoding (latest visited step; 0 for ghosts). Index 0 is
// the stop node with a constant all-zero embedding, connected to every node
// by zero-length edges by convention.
struct EncodedGraph {
  std::vector<int> ids;        // ids[0] == kStopId
  std::vector<bool> masked;    // visited and current nodes
  Mat x;                       // (n+1) x d_in
  Mat e;                       // (n+1) x (n+1) spatial matrix, stop row/col = 0
};

inline EncodedGraph encode_graph(const TopoGraph& g, double agent_heading_deg,
                                 int descriptor_len) {
  if (g.empty()) throw std::invalid_argument("encode_graph: empty graph");
  const auto ids = g.node_ids();
  const int n = static_cast<int>(ids.size());
  const int d_in = descriptor_len + 4;
  const Vec2 cur_pos = g.node(g.current_id()).position;

  EncodedGraph enc;
  enc.ids.push_back(kStopId);
  enc.masked.push_back(false);
  enc.x = Mat(n + 1, d_in);
  for (int i = 0; i < n; ++i) {
    const Node& node = g.node(ids[static_cast<std::size_t>(i)]);
    enc.ids.push_back(node.id);
    enc.masked.push_back(node.kind != NodeKind::Ghost);
    const int row = i + 1;
    for (int b = 0; b < descriptor_len; ++b)
      enc.x(row, b) = b < static_cast<int>(node.descriptor.size()) ? node.descriptor[static_cast<std::size_t>(b)] : 0.0;
    const double dist = distance(cur_pos, node.position);
    const double dphi = dist > 0.0 ? wrap180(bearing_deg(cur_pos, node.position) - agent_heading_deg) : 0.0;
    enc.x(row, descriptor_len + 0) = std::cos(deg_to_rad(dphi));
    enc.x(row, descriptor_len + 1) = std::sin(deg_to_rad(dphi));
    enc.x(row, descriptor_len + 2) = dist;
    enc.x(row, descriptor_len + 3) = static_cast<double>(node.last_visit_step);
  }

  const Mat inner = g.spatial_matrix(ids);
  enc.e = Mat(n + 1, n + 1, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) enc.e(i + 1, j + 1) = inner(i, j);
  return enc;
}

// Eq-style goal scoring: GASA over the node encodings, then a feed-forward
// head per node. Visited and current nodes are masked so a goal is picked
// from ghosts or the stop node.
inline std::vector<double> score_nodes(const EncodedGraph& enc, const GasaWeights& w) {
  const Mat h = gasa_forward(enc.x, enc.e, w);
  std::vector<double> scores(static_cast<std::size_t>(h.rows()), 0.0);
  for (int i = 0; i < h.rows(); ++i) {
    double s = w.ffn_b2;
    for (int j = 0; j < w.ffn_w1.cols(); ++j) {
      double a = w.ffn_b1[static_cast<std::size_t>(j)];
      for (int k = 0; k < h.cols(); ++k) a += h(i, k) * w.ffn_w1(k, j);
      if (a > 0.0) s += a * w.ffn_w2(j, 0);  // ReLU
    }
    scores[static_cast<std::size_t>(i)] = s;
  }
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (enc.masked[i]) scores[i] = kMaskedScore;
  return scores;
}

enum class SelectMode { Argmax, Sample };

struct GoalDecision {
  std::vector<int> ids;
  std::vector<double> scores;
  int chosen = kStopId;
  SelectMode mode = SelectMode::Argmax;
};

// Argmax with ties to the smaller id (stop sorts first), or a seeded softmax
// sample over the unmasked scores. All-masked input forces STOP.
inline int select_goal(const std::vector<int>& ids, const std::vector<double>& scores,
                       SelectMode mode, std::mt19937_64& rng) {
  if (ids.size() != scores.size() || ids.empty())
    throw std::invalid_argument("select_goal: ids/scores mismatch");
  std::vector<std::size_t> finite;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] != kMaskedScore) finite.push_back(i);
  if (finite.empty()) return kStopId;

  if (mode == SelectMode::Argmax) {
    std::size_t best = finite.front();
    for (const std::size_t i : finite)
      if (scores[i] > scores[best] || (scores[i] == scores[best] && ids[i] < ids[best])) best = i;
    return ids[best];
  }

  double mx = scores[finite.front()];
  for (const std::size_t i : finite) mx = std::max(mx, scores[i]);
  std::vector<double> p;
  double sum = 0.0;
  for (const std::size_t i : finite) {
    p.push_back(std::exp(scores[i] - mx));
    sum += p.back();
  }
  const double u = canonical(rng) * sum;
  double acc = 0.0;
  for (std::size_t k = 0; k < finite.size(); ++k) {
    acc += p[k];
    if (u < acc) return ids[finite[k]];
  }
  return ids[finite.back()];
}

struct Plan {
  std::vector<int> node_ids;   // excludes the current node, includes the goal
  std::vector<Vec2> points;
  double length = 0.0;         // sum of traversed edge lengths
};

// Dijkstra shortest path by stored edge lengths; among equal-length paths the
// lexicographically smallest id sequence wins (greedy walk on the
// distance-to-goal field).
inline Plan plan_path(const TopoGraph& g, int current, int goal) {
  if (!g.has_node(goal)) throw std::invalid_argument("plan_path: unknown goal");
  if (!g.has_node(current)) throw std::invalid_argument("plan_path: unknown current node");

  std::map<int, double> dist;  // distance to goal
  std::multimap<double, int> pq;
  dist[goal] = 0.0;
  pq.insert({0.0, goal});
  while (!pq.empty()) {
    const auto [d, u] = *pq.begin();
    pq.erase(pq.begin());
    if (d > dist[u]) continue;
    for (const auto& [v, len] : g.neighbors(u)) {
      const double nd = d + len;
      const auto it = dist.find(v);
      if (it == dist.end() || nd < it->second) {
        dist[v] = nd;
        pq.insert({nd, v});
      }
    }
  }
  const auto dc = dist.find(current);
  if (dc == dist.end()) throw std::invalid_argument("plan_path: goal unreachable");

  Plan plan;
  plan.length = dc->second;
  int u = current;
  while (u != goal) {
    int next = -1;
    const double du = dist.at(u);
    for (const auto& [v, len] : g.neighbors(u)) {
      const auto it = dist.find(v);
      if (it == dist.end()) continue;
      if (std::fabs(du - (len + it->second)) <= 1e-12 && (next < 0 || v < next)) next = v;
    }
    if (next < 0) throw std::invalid_argument("plan_path: broken shortest-path field");
    plan.node_ids.push_back(next);
    plan.points.push_back(g.node(next).position);
    u = next;
  }
  return plan;
}

// R2R-style demonstrator: stop within the stop radius of the target, else the
// ghost with the shortest geodesic distance to the target, ties to the
// smaller id. Point-occluded ghosts rank +inf; if every ghost is unreachable
// the Euclidean distance breaks the deadlock so episodes can progress.
inline int teacher_goal_r2r(const TopoGraph& g, const GeodesicField& to_target,
                            const Vec2& target, const Vec2& agent_pos,
                            double stop_radius = 3.0) {
  if (to_target.distance_to(agent_pos) <= stop_radius) return kStopId;
  const auto ghosts = g.ghost_ids();
  if (ghosts.empty()) return kStopId;
  int best = -1;
  double best_d = kInfDistance;
  for (const int id : ghosts) {
    const double d = to_target.distance_to(g.node(id).position);
    if (d < best_d) {
      best_d = d;
      best = id;
    }
  }
  if (best >= 0) return best;
  for (const int id : ghosts) {
    const double d = distance(g.node(id).position, target);
    if (best < 0 || d < best_d) {
      best_d = d;
      best = id;
    }
  }
  return best;
}

// RxR-style path-fidelity demonstrator. Subgoal fields are geodesic fields
// sourced at each reference subgoal; visited advances as a prefix.
inline int teacher_goal_rxr(const TopoGraph& g,
                            const std::vector<const GeodesicField*>& subgoal_fields,
                            const std::vector<Vec2>& subgoals, std::vector<bool>& visited_mask,
                            const Vec2& agent_pos, double visit_radius = 1.5,
                            double stop_radius = 3.0) {
  if (subgoals.empty()) return kStopId;
  if (visited_mask.size() != subgoals.size())
    throw std::invalid_argument("teacher_goal_rxr: mask size mismatch");

  std::size_t next = 0;
  while (next < subgoals.size() && visited_mask[next]) ++next;
  while (next < subgoals.size() &&
         subgoal_fields[next]->distance_to(agent_pos) <= visit_radius) {
    visited_mask[next] = true;
    ++next;
  }

  const std::size_t last = subgoals.size() - 1;
  if (next >= subgoals.size()) {
    if (subgoal_fields[last]->distance_to(agent_pos) <= stop_radius) return kStopId;
    next = last;  // all marked but the agent drifted; steer back to the path end
  }

  const auto ghosts = g.ghost_ids();
  if (ghosts.empty()) return kStopId;
  int best = -1;
  double best_d = kInfDistance;
  for (const int id : ghosts) {
    const double d = subgoal_fields[next]->distance_to(g.node(id).position);
    if (d < best_d) {
      best_d = d;
      best = id;
    }
  }
  if (best >= 0) return best;
  for (const int id : ghosts) {
    const double d = distance(g.node(id).position, subgoals[next]);
    if (best < 0 || d < best_d) {
      best_d = d;
      best = id;
    }
  }
  return best;
}

}  // namespace toponav
