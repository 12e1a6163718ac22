#include "fdrrt/roadmap.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

#include "fdrrt/errors.hpp"

namespace fdrrt {

namespace {

std::uint64_t edge_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

std::optional<EdgeId> Roadmap::edge_between(NodeId a, NodeId b) const {
  const auto it = edge_lookup_.find(edge_key(a, b));
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

NodeId Roadmap::add_node(const Configuration& q) {
  nodes.push_back(q);
  adjacency.emplace_back();
  return static_cast<NodeId>(nodes.size() - 1);
}

std::optional<EdgeId> Roadmap::add_edge(NodeId a, NodeId b, double cost) {
  if (a == b) return std::nullopt;
  const std::uint64_t key = edge_key(a, b);
  if (edge_lookup_.count(key)) return std::nullopt;
  const EdgeId id = static_cast<EdgeId>(edges.size());
  edges.push_back(RoadmapEdge{a, b, cost});
  adjacency[a].push_back(id);
  adjacency[b].push_back(id);
  edge_lookup_.emplace(key, id);
  return id;
}

void Roadmap::rebuild_index() {
  adjacency.assign(nodes.size(), {});
  edge_lookup_.clear();
  for (EdgeId id = 0; id < edges.size(); ++id) {
    adjacency[edges[id].u].push_back(id);
    adjacency[edges[id].v].push_back(id);
    edge_lookup_.emplace(edge_key(edges[id].u, edges[id].v), id);
  }
}

namespace {

Configuration sample_limits(const RobotModel& robot, RandomEngine& rng) {
  Configuration q(robot.num_joints());
  for (std::size_t j = 0; j < q.size(); ++j) {
    q[j] = rng.uniform(robot.joint_limits[j].lower, robot.joint_limits[j].upper);
  }
  return q;
}

Configuration steer(const Configuration& from, const Configuration& to,
                    double step) {
  const double d = config_distance(from, to);
  if (d <= step) return to;
  Configuration q(from.size());
  const double t = step / d;
  for (std::size_t j = 0; j < q.size(); ++j) {
    q[j] = from[j] + t * (to[j] - from[j]);
  }
  return q;
}

struct GrowTree {
  std::vector<Configuration> configs;
  std::vector<int> parent;

  int add(const Configuration& q, int par) {
    configs.push_back(q);
    parent.push_back(par);
    return static_cast<int>(configs.size() - 1);
  }
  int nearest(const Configuration& q) const {
    int best = 0;
    double best_d = config_distance(configs[0], q);
    for (std::size_t i = 1; i < configs.size(); ++i) {
      const double d = config_distance(configs[i], q);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }
};

enum class ExtendStatus { Trapped, Advanced, Reached };

ExtendStatus extend(GrowTree& tree, const Configuration& target,
                    const RobotModel& robot,
                    const std::vector<Obstacle>& obstacles,
                    const RoadmapParams& params, int& out_index) {
  const int near = tree.nearest(target);
  const Configuration q_new = steer(tree.configs[near], target, params.rrt_step);
  if (motion_collides(robot, tree.configs[near], q_new, obstacles,
                      params.validity_step)) {
    return ExtendStatus::Trapped;
  }
  out_index = tree.add(q_new, near);
  return config_distance(q_new, target) < 1e-12 ? ExtendStatus::Reached
                                                : ExtendStatus::Advanced;
}

std::vector<Configuration> trace_to_root(const GrowTree& tree, int index) {
  std::vector<Configuration> path;
  for (int i = index; i >= 0; i = tree.parent[i]) {
    path.push_back(tree.configs[i]);
  }
  return path;
}

}  // namespace

std::optional<std::vector<Configuration>> rrt_connect(
    const RobotModel& robot, const Configuration& q_start,
    const Configuration& q_goal, const std::vector<Obstacle>& obstacles,
    const RoadmapParams& params, RandomEngine& rng) {
  if (config_distance(q_start, q_goal) < 1e-12) {
    return std::vector<Configuration>{q_start};
  }
  if (!motion_collides(robot, q_start, q_goal, obstacles, params.validity_step)) {
    return std::vector<Configuration>{q_start, q_goal};
  }

  GrowTree start_tree, goal_tree;
  start_tree.add(q_start, -1);
  goal_tree.add(q_goal, -1);
  GrowTree* a = &start_tree;
  GrowTree* b = &goal_tree;

  for (std::uint32_t it = 0; it < params.rrt_max_iters; ++it) {
    const Configuration q_rand = sample_limits(robot, rng);
    int a_idx = -1;
    if (extend(*a, q_rand, robot, obstacles, params, a_idx) !=
        ExtendStatus::Trapped) {
      // Connect: greedily extend the other tree toward the new vertex.
      int b_idx = -1;
      ExtendStatus status;
      do {
        status = extend(*b, a->configs[a_idx], robot, obstacles, params, b_idx);
      } while (status == ExtendStatus::Advanced);
      if (status == ExtendStatus::Reached) {
        std::vector<Configuration> from_start = trace_to_root(
            a == &start_tree ? *a : *b, a == &start_tree ? a_idx : b_idx);
        std::reverse(from_start.begin(), from_start.end());
        std::vector<Configuration> from_goal = trace_to_root(
            a == &start_tree ? *b : *a, a == &start_tree ? b_idx : a_idx);
        // The junction configuration appears in both halves; drop one copy.
        from_start.pop_back();
        from_start.insert(from_start.end(), from_goal.begin(), from_goal.end());
        return from_start;
      }
    }
    std::swap(a, b);
  }
  return std::nullopt;
}

std::vector<Configuration> shortcut(const RobotModel& robot,
                                    std::vector<Configuration> path,
                                    const std::vector<Obstacle>& obstacles,
                                    RandomEngine& rng, std::uint32_t rounds,
                                    double validity_step) {
  for (std::uint32_t r = 0; r < rounds; ++r) {
    if (path.size() < 3) break;
    std::size_t i = rng.uniform_index(path.size());
    std::size_t j = rng.uniform_index(path.size());
    if (i > j) std::swap(i, j);
    if (j <= i + 1) continue;
    if (!motion_collides(robot, path[i], path[j], obstacles, validity_step)) {
      path.erase(path.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                 path.begin() + static_cast<std::ptrdiff_t>(j));
    }
  }
  return path;
}

Roadmap build_roadmap(const RobotModel& robot,
                      const std::vector<Configuration>& targets,
                      const std::vector<Obstacle>& obstacles,
                      const RoadmapParams& params, RandomEngine& rng) {
  robot.validate();
  if (targets.empty()) {
    throw std::invalid_argument("build_roadmap: at least one target required");
  }
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (!within_joint_limits(robot, targets[t])) {
      throw std::invalid_argument("build_roadmap: target " + std::to_string(t) +
                                  " violates joint limits");
    }
    if (config_collides(robot, targets[t], obstacles)) {
      throw std::invalid_argument("build_roadmap: target " + std::to_string(t) +
                                  " collides with the environment");
    }
  }

  Roadmap rm;
  auto add_merged = [&](const Configuration& q) -> NodeId {
    for (NodeId n = 0; n < rm.nodes.size(); ++n) {
      if (config_distance(rm.nodes[n], q) <= params.merge_tolerance) return n;
    }
    return rm.add_node(q);
  };

  for (const Configuration& t : targets) {
    rm.target_ids.push_back(add_merged(t));
  }

  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      if (rm.target_ids[i] == rm.target_ids[j]) continue;
      std::optional<std::vector<Configuration>> path;
      for (std::uint32_t attempt = 0; attempt <= params.rrt_retries; ++attempt) {
        path = rrt_connect(robot, targets[i], targets[j], obstacles, params, rng);
        if (path) break;
      }
      if (!path) {
        throw PlanningFailure("build_roadmap: no path between targets " +
                              std::to_string(i) + " and " + std::to_string(j));
      }
      *path = shortcut(robot, std::move(*path), obstacles, rng,
                       params.shortcut_rounds, params.validity_step);
      NodeId prev = add_merged((*path)[0]);
      for (std::size_t w = 1; w < path->size(); ++w) {
        const NodeId cur = add_merged((*path)[w]);
        if (cur != prev) {
          rm.add_edge(prev, cur, config_distance(rm.nodes[prev], rm.nodes[cur]));
        }
        prev = cur;
      }
    }
  }

  rm.target_nodes = rm.target_ids;
  std::sort(rm.target_nodes.begin(), rm.target_nodes.end());
  rm.target_nodes.erase(
      std::unique(rm.target_nodes.begin(), rm.target_nodes.end()),
      rm.target_nodes.end());

  // Connectivity: every target must be reachable from the first one.
  if (rm.target_nodes.size() > 1) {
    std::vector<char> seen(rm.nodes.size(), 0);
    std::vector<NodeId> stack{rm.target_nodes[0]};
    seen[rm.target_nodes[0]] = 1;
    while (!stack.empty()) {
      const NodeId n = stack.back();
      stack.pop_back();
      for (EdgeId e : rm.adjacency[n]) {
        const NodeId m = rm.other_end(e, n);
        if (!seen[m]) {
          seen[m] = 1;
          stack.push_back(m);
        }
      }
    }
    for (NodeId t : rm.target_nodes) {
      if (!seen[t]) {
        throw PlanningFailure("build_roadmap: target node " + std::to_string(t) +
                              " disconnected from the rest");
      }
    }
  }
  return rm;
}

NextHopPolicy next_hop_policy(const Roadmap& roadmap,
                              const std::vector<NodeId>& goal_set) {
  if (goal_set.empty()) {
    throw std::invalid_argument("next_hop_policy: goal set must be non-empty");
  }
  const std::size_t n = roadmap.nodes.size();
  NextHopPolicy policy;
  policy.goal_set = goal_set;
  std::sort(policy.goal_set.begin(), policy.goal_set.end());
  policy.goal_set.erase(
      std::unique(policy.goal_set.begin(), policy.goal_set.end()),
      policy.goal_set.end());
  policy.next_hop.assign(n, kNoHop);
  policy.nearest_goal.assign(n, kNoHop);
  policy.cost_to_goal.assign(n, std::numeric_limits<double>::infinity());

  using Item = std::pair<double, NodeId>;  // (cost, node), min-heap
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (NodeId g : policy.goal_set) {
    if (g >= n) {
      throw std::invalid_argument("next_hop_policy: goal node out of range");
    }
    policy.cost_to_goal[g] = 0.0;
    policy.next_hop[g] = g;
    policy.nearest_goal[g] = g;
    heap.emplace(0.0, g);
  }
  while (!heap.empty()) {
    const auto [cost, u] = heap.top();
    heap.pop();
    if (cost > policy.cost_to_goal[u]) continue;
    for (EdgeId e : roadmap.adjacency[u]) {
      const NodeId w = roadmap.other_end(e, u);
      const double c = cost + roadmap.edges[e].cost;
      if (c < policy.cost_to_goal[w]) {
        policy.cost_to_goal[w] = c;
        policy.next_hop[w] = u;
        policy.nearest_goal[w] = policy.nearest_goal[u];
        heap.emplace(c, w);
      }
    }
  }
  return policy;
}

NodeId random_neighbor(const Roadmap& roadmap, NodeId node, RandomEngine& rng) {
  const auto& incident = roadmap.adjacency[node];
  const std::uint64_t pick = rng.uniform_index(incident.size() + 1);
  if (pick == incident.size()) return node;
  return roadmap.other_end(incident[pick], node);
}

bool revalidate_roadmap(const RobotModel& robot, const Roadmap& roadmap,
                        const std::vector<Obstacle>& obstacles,
                        double validity_step) {
  for (const Configuration& q : roadmap.nodes) {
    if (!within_joint_limits(robot, q)) return false;
    if (config_collides(robot, q, obstacles)) return false;
  }
  for (const RoadmapEdge& e : roadmap.edges) {
    if (motion_collides(robot, roadmap.nodes[e.u], roadmap.nodes[e.v], obstacles,
                        validity_step)) {
      return false;
    }
    if (std::abs(e.cost - config_distance(roadmap.nodes[e.u], roadmap.nodes[e.v])) >
        1e-12) {
      return false;
    }
  }
  return true;
}

}  // namespace fdrrt
