#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fdrrt/rng.hpp"
#include "fdrrt/sweptvol.hpp"

namespace fdrrt {

/// One robot's share of the implicit product graph.
struct RobotSlot {
  RobotModel model;
  AnnotatedRoadmap annotated;
};

/// The implicit tensor-product graph over all per-robot roadmaps. Vertices
/// are tuples of roadmap node ids; an edge moves each robot along one roadmap
/// edge or keeps it in place (all-stay excluded). Immutable once built.
struct ImplicitGraph {
  std::vector<RobotSlot> robots;

  std::size_t size() const { return robots.size(); }
  const Roadmap& roadmap(std::size_t i) const { return robots[i].annotated.roadmap; }

  /// Checks N >= 2 and that all annotations share one grid.
  void validate() const;
};

struct CompositeVertex {
  std::vector<NodeId> node_ids;

  bool operator==(const CompositeVertex& o) const {
    return node_ids == o.node_ids;
  }

  struct Hash {
    std::size_t operator()(const CompositeVertex& v) const {
      std::size_t seed = v.node_ids.size();
      for (NodeId id : v.node_ids) {
        seed ^= id + 0x9e3779b9 + (seed << 6) + (seed >> 2);
      }
      return seed;
    }
  };
};

struct CompositeState {
  std::vector<Configuration> configs;
};

CompositeState state_of(const ImplicitGraph& graph, const CompositeVertex& v);

/// Concatenated flat angle vector of a composite vertex; the planner uses
/// flats for fast distance evaluation.
std::vector<double> flat_state_of(const ImplicitGraph& graph,
                                  const CompositeVertex& v);
std::vector<double> flatten(const CompositeState& s);
double flat_distance(const std::vector<double>& a, const std::vector<double>& b);

/// L2 norm of the concatenated per-robot angle differences.
double composite_distance(const CompositeState& a, const CompositeState& b);

/// Independent uniform sample within each robot's joint limits.
CompositeState sample_random(const ImplicitGraph& graph, RandomEngine& rng);

/// True iff every component stays or moves one roadmap edge and at least one
/// component moves.
bool is_composite_neighbor(const ImplicitGraph& graph, const CompositeVertex& v,
                           const CompositeVertex& w);

/// Composite-space move cost; stationary components contribute 0 and
/// edge_cost(v, v) == 0. Throws std::invalid_argument for a non-neighbor pair.
double edge_cost(const ImplicitGraph& graph, const CompositeVertex& v,
                 const CompositeVertex& w);

/// Swept-volume edge validity: for every robot pair, intersect the moving
/// robots' edge volumes (or the node volume when a robot stays). False as
/// soon as any pair's voxel sets share an index.
bool is_edge_valid(const ImplicitGraph& graph, const CompositeVertex& v,
                   const CompositeVertex& w);

}  // namespace fdrrt
