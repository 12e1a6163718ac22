#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "fdrrt/geom.hpp"
#include "fdrrt/rng.hpp"

namespace fdrrt {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct RoadmapEdge {
  NodeId u = 0;
  NodeId v = 0;
  double cost = 0.0;
};

/// Per-robot graph of collision-free configurations. Edges are undirected,
/// cost = configuration-space L2 length. Built from best-cost paths between
/// the robot's targets; no self-loops, no duplicate edges.
struct Roadmap {
  std::vector<Configuration> nodes;
  std::vector<RoadmapEdge> edges;
  std::vector<std::vector<EdgeId>> adjacency;  // node -> incident edge ids
  std::vector<NodeId> target_ids;              // input target order -> node id
  std::vector<NodeId> target_nodes;            // sorted unique target node ids

  NodeId other_end(EdgeId e, NodeId n) const {
    return edges[e].u == n ? edges[e].v : edges[e].u;
  }
  std::optional<EdgeId> edge_between(NodeId a, NodeId b) const;
  std::size_t degree(NodeId n) const { return adjacency[n].size(); }

  NodeId add_node(const Configuration& q);
  /// Adds an undirected edge unless it already exists or is a self-loop.
  std::optional<EdgeId> add_edge(NodeId a, NodeId b, double cost);
  void rebuild_index();

 private:
  std::unordered_map<std::uint64_t, EdgeId> edge_lookup_;
};

struct RoadmapParams {
  double rrt_step = 0.3;            // RRT-Connect extension step (rad)
  std::uint32_t rrt_max_iters = 20000;
  std::uint32_t rrt_retries = 5;
  std::uint32_t shortcut_rounds = 200;
  double merge_tolerance = 1e-6;    // node dedup distance (rad)
  double validity_step = 0.05;      // motion collision-check spacing (rad)
};

/// Bidirectional RRT-Connect between two collision-free configurations.
/// Returns the waypoint path, or nullopt once the iteration budget runs out.
std::optional<std::vector<Configuration>> rrt_connect(
    const RobotModel& robot, const Configuration& q_start,
    const Configuration& q_goal, const std::vector<Obstacle>& obstacles,
    const RoadmapParams& params, RandomEngine& rng);

/// Random vertex-pair shortcutting; never increases cost, keeps endpoints.
std::vector<Configuration> shortcut(const RobotModel& robot,
                                    std::vector<Configuration> path,
                                    const std::vector<Obstacle>& obstacles,
                                    RandomEngine& rng, std::uint32_t rounds,
                                    double validity_step);

/// Builds the roadmap for one robot from its target list: a shortcut
/// RRT-Connect path per unordered target pair, merged into one graph.
/// Throws PlanningFailure naming the first unsolvable pair.
Roadmap build_roadmap(const RobotModel& robot,
                      const std::vector<Configuration>& targets,
                      const std::vector<Obstacle>& obstacles,
                      const RoadmapParams& params, RandomEngine& rng);

constexpr NodeId kNoHop = std::numeric_limits<NodeId>::max();

/// Next hop toward the cheapest goal node, from a multi-source Dijkstra.
/// Nodes outside the goals' component have next_hop = kNoHop and
/// cost_to_goal = +inf.
struct NextHopPolicy {
  std::vector<NodeId> goal_set;        // sorted
  std::vector<NodeId> next_hop;        // per node
  std::vector<NodeId> nearest_goal;    // per node, goal the hop chain ends at
  std::vector<double> cost_to_goal;    // per node
};

NextHopPolicy next_hop_policy(const Roadmap& roadmap,
                              const std::vector<NodeId>& goal_set);

/// Uniform draw from adjacency(node) plus node itself.
NodeId random_neighbor(const Roadmap& roadmap, NodeId node, RandomEngine& rng);

/// Re-checks every node and edge against the environment; true when clean.
bool revalidate_roadmap(const RobotModel& robot, const Roadmap& roadmap,
                        const std::vector<Obstacle>& obstacles,
                        double validity_step);

}  // namespace fdrrt
