#pragma once

#include <cassert>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "toponav/geometry.hpp"
#include "toponav/mat.hpp"

namespace toponav {

enum class NodeKind { Visited, Current, Ghost };

struct Node {
  int id = 0;
  NodeKind kind = NodeKind::Ghost;
  Vec2 position;
  std::vector<double> descriptor;
  int accum_count = 1;       // waypoints folded into a ghost
  int last_visit_step = 0;   // 0 for ghosts

  // Accumulation state so ghost position/descriptor stay exact running means.
  Vec2 pos_sum;
  std::vector<double> desc_sum;
};

struct PlacedWaypoint {
  Vec2 position;  // world frame; relative->absolute conversion is the caller's duty
  std::vector<double> descriptor;
};

struct UpdateReport {
  int current_id = 0;
  bool current_reused = false;
  std::vector<int> created_ghosts;
  std::vector<int> merged_ghosts;
  std::vector<int> linked_visited;   // case-1 localizations
  int discarded = 0;                 // waypoints folded onto the current node
};

// Topological map: nodes for places, undirected edges for reachability, each
// edge storing the Euclidean distance between its endpoints at insertion
// time. The stop node is planner-side and never stored here.
class TopoGraph {
 public:
  using EdgeMap = std::map<std::pair<int, int>, double>;

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }
  int current_id() const { return current_id_; }

  const Node& node(int id) const {
    const auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::invalid_argument("topomap: unknown node id");
    return it->second;
  }

  bool has_node(int id) const { return nodes_.count(id) != 0; }
  const std::map<int, Node>& nodes() const { return nodes_; }
  const EdgeMap& edges() const { return edges_; }

  std::vector<int> node_ids() const {
    std::vector<int> ids;
    ids.reserve(nodes_.size());
    for (const auto& [id, n] : nodes_) ids.push_back(id);
    return ids;
  }

  std::vector<int> ghost_ids() const {
    std::vector<int> ids;
    for (const auto& [id, n] : nodes_)
      if (n.kind == NodeKind::Ghost) ids.push_back(id);
    return ids;
  }

  // Nearest node under the localization threshold. Iteration runs in id
  // order, so strict comparison breaks ties toward the smaller id.
  std::optional<int> localize(const Vec2& p, double gamma) const {
    if (gamma <= 0.0) throw std::invalid_argument("localize: gamma must be > 0");
    int best_id = -1;
    double best = gamma;
    for (const auto& [id, n] : nodes_) {
      const double d = distance(n.position, p);
      if (d < best) {
        best = d;
        best_id = id;
      }
    }
    if (best_id < 0) return std::nullopt;
    return best_id;
  }

  // One decision-step update: demote the previous current node, place the new
  // one (reusing a visited node within gamma), then fold the step's waypoints
  // in via the three-case rule. Waypoints are localized against a snapshot
  // taken before any waypoint mutation, so the outcome does not depend on
  // intra-step ordering of merges.
  UpdateReport update(const Vec2& agent_pos, const std::vector<double>& panorama_desc,
                      const std::vector<PlacedWaypoint>& waypoints, int step_t, double gamma,
                      bool accumulate = true) {
    UpdateReport rep;
    const int old_current = current_id_;
    if (old_current >= 0) nodes_[old_current].kind = NodeKind::Visited;

    const auto loc = localize(agent_pos, gamma);
    int cur;
    if (loc && nodes_[*loc].kind == NodeKind::Visited) {
      cur = *loc;
      Node& n = nodes_[cur];
      n.kind = NodeKind::Current;
      n.last_visit_step = step_t;
      n.descriptor = panorama_desc;
      rep.current_reused = true;
    } else {
      cur = next_id_++;
      Node n;
      n.id = cur;
      n.kind = NodeKind::Current;
      n.position = agent_pos;
      n.pos_sum = agent_pos;
      n.descriptor = panorama_desc;
      n.desc_sum = panorama_desc;
      n.accum_count = 1;
      n.last_visit_step = step_t;
      nodes_.emplace(cur, std::move(n));
    }
    current_id_ = cur;
    if (old_current >= 0 && old_current != cur) add_edge(old_current, cur);
    rep.current_id = cur;

    // Localization snapshot: all nodes as of now, before waypoint mutations.
    std::vector<std::optional<int>> locs;
    locs.reserve(waypoints.size());
    for (const auto& wp : waypoints) locs.push_back(localize(wp.position, gamma));

    for (std::size_t i = 0; i < waypoints.size(); ++i) {
      const auto& wp = waypoints[i];
      // A waypoint at the agent's own location is degenerate even when the
      // reused current node sits elsewhere: treat it as a current-node hit.
      const double d_agent = distance(wp.position, agent_pos);
      if (d_agent < gamma &&
          (!locs[i] || d_agent < distance(nodes_.at(*locs[i]).position, wp.position))) {
        ++rep.discarded;
        continue;
      }
      if (!locs[i]) {
        const int gid = next_id_++;
        Node n;
        n.id = gid;
        n.kind = NodeKind::Ghost;
        n.position = wp.position;
        n.pos_sum = wp.position;
        n.descriptor = wp.descriptor;
        n.desc_sum = wp.descriptor;
        n.accum_count = 1;
        n.last_visit_step = 0;
        nodes_.emplace(gid, std::move(n));
        add_edge(cur, gid);
        rep.created_ghosts.push_back(gid);
        continue;
      }
      const int hit = *locs[i];
      if (hit == cur) {
        ++rep.discarded;  // degenerate: waypoint at the agent's own node
        continue;
      }
      Node& n = nodes_[hit];
      if (n.kind == NodeKind::Ghost) {
        if (accumulate) {
          n.pos_sum = n.pos_sum + wp.position;
          for (std::size_t b = 0; b < n.desc_sum.size() && b < wp.descriptor.size(); ++b)
            n.desc_sum[b] += wp.descriptor[b];
          n.accum_count += 1;
          n.position = n.pos_sum * (1.0 / n.accum_count);
          n.descriptor = n.desc_sum;
          for (auto& v : n.descriptor) v /= n.accum_count;
        }
        add_edge(cur, hit);
        rep.merged_ghosts.push_back(hit);
      } else {
        add_edge(cur, hit);
        rep.linked_visited.push_back(hit);
      }
    }
    return rep;
  }

  // Ghosts are only ever adjacent to visited/current nodes, so removing one
  // cannot disconnect the rest of the map.
  void delete_ghost(int id) {
    const auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::invalid_argument("delete_ghost: unknown node id");
    if (it->second.kind != NodeKind::Ghost)
      throw std::invalid_argument("delete_ghost: node is not a ghost");
    nodes_.erase(it);
    for (auto e = edges_.begin(); e != edges_.end();) {
      if (e->first.first == id || e->first.second == id)
        e = edges_.erase(e);
      else
        ++e;
    }
  }

  double edge_length(int a, int b) const {
    const auto it = edges_.find(ordered(a, b));
    if (it == edges_.end()) throw std::invalid_argument("topomap: no such edge");
    return it->second;
  }

  bool has_edge(int a, int b) const { return edges_.count(ordered(a, b)) != 0; }

  std::vector<std::pair<int, double>> neighbors(int id) const {
    std::vector<std::pair<int, double>> out;
    for (const auto& [key, len] : edges_) {
      if (key.first == id) out.push_back({key.second, len});
      else if (key.second == id) out.push_back({key.first, len});
    }
    return out;
  }

  // All-pairs shortest path lengths over the stored edge lengths, indexed by
  // sorted node id order. Disconnected pairs come back +inf (cannot happen
  // while the connectivity invariant holds).
  Mat spatial_matrix(const std::vector<int>& ids) const {
    const int n = static_cast<int>(ids.size());
    if (n == 0) throw std::invalid_argument("spatial_matrix: empty graph");
    std::map<int, int> index;
    for (int i = 0; i < n; ++i) index[ids[static_cast<std::size_t>(i)]] = i;
    Mat e(n, n, kSpatialInf);
    for (int i = 0; i < n; ++i) e(i, i) = 0.0;
    // Dijkstra from each node; graphs are small and sparse.
    for (int s = 0; s < n; ++s) {
      std::map<int, double> dist;
      std::multimap<double, int> pq;
      dist[ids[static_cast<std::size_t>(s)]] = 0.0;
      pq.insert({0.0, ids[static_cast<std::size_t>(s)]});
      while (!pq.empty()) {
        const auto [d, u] = *pq.begin();
        pq.erase(pq.begin());
        if (d > dist[u]) continue;
        for (const auto& [v, len] : neighbors(u)) {
          const double nd = d + len;
          const auto it = dist.find(v);
          if (it == dist.end() || nd < it->second) {
            dist[v] = nd;
            pq.insert({nd, v});
          }
        }
      }
      for (const auto& [v, d] : dist) e(s, index.at(v)) = d;
    }
    return e;
  }

  Mat spatial_matrix() const { return spatial_matrix(node_ids()); }

  // Connectivity over all stored nodes (stop nodes are never stored).
  bool connected() const {
    if (nodes_.empty()) return true;
    std::map<int, bool> seen;
    std::vector<int> stack{nodes_.begin()->first};
    seen[nodes_.begin()->first] = true;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& [v, len] : neighbors(u)) {
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    return seen.size() == nodes_.size();
  }

  static constexpr double kSpatialInf = std::numeric_limits<double>::infinity();

 private:
  static std::pair<int, int> ordered(int a, int b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  }

  void add_edge(int a, int b) {
    if (a == b) return;  // no self-loops
    edges_[ordered(a, b)] = distance(nodes_.at(a).position, nodes_.at(b).position);
  }

  std::map<int, Node> nodes_;
  EdgeMap edges_;
  int next_id_ = 1;
  int current_id_ = -1;
};

}  // namespace toponav
