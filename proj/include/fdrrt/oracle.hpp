#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fdrrt/composite.hpp"

namespace fdrrt {

/// Fully materialized tensor-product graph for ground-truth search on small
/// instances. Vertices are mixed-radix encodings of per-robot node tuples.
struct ExplicitProductGraph {
  std::vector<std::uint32_t> radices;  // per-robot roadmap node counts
  std::uint64_t vertex_count = 0;
  std::vector<std::vector<std::pair<std::uint64_t, double>>> adjacency;

  std::uint64_t index_of(const CompositeVertex& v) const;
  CompositeVertex vertex_at(std::uint64_t index) const;
};

constexpr std::uint64_t kDefaultExplicitCap = 1'000'000;

/// Enumerates every composite vertex and every valid composite move, using
/// the same edge_cost / is_edge_valid as the planner. Throws ConfigError when
/// the product exceeds the cap.
ExplicitProductGraph build_explicit(const ImplicitGraph& graph,
                                    std::uint64_t cap = kDefaultExplicitCap);

struct OracleResult {
  double cost = 0.0;  // +inf when unreachable
  std::vector<CompositeVertex> path;
};

/// Dijkstra from the start to the cheapest vertex satisfying the predicate.
OracleResult optimal_cost(
    const ExplicitProductGraph& graph, const CompositeVertex& start,
    const std::function<bool(const CompositeVertex&)>& goal_predicate);

/// A node stay (from == to) or a straight roadmap edge of one robot.
struct Motion {
  Configuration from;
  Configuration to;

  static Motion stay(Configuration q) { return Motion{q, q}; }
};

/// Exact dense-sampling referent of the voxel check: true iff any capsule of
/// robot i at any sampled configuration of motion i touches any capsule of
/// robot j at any sampled configuration of motion j (space-only overlap).
/// radius_margin inflates both robots' link radii.
bool exact_swept_overlap(const RobotModel& robot_i, const Motion& motion_i,
                         const RobotModel& robot_j, const Motion& motion_j,
                         double sample_step, double radius_margin = 0.0);

}  // namespace fdrrt
