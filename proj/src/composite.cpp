#include "fdrrt/composite.hpp"

#include <cmath>
#include <stdexcept>

#include "fdrrt/errors.hpp"

namespace fdrrt {

void ImplicitGraph::validate() const {
  if (robots.size() < 2) {
    throw std::invalid_argument("ImplicitGraph: at least two robots required");
  }
  const VoxelGrid& grid = robots[0].annotated.grid;
  for (const RobotSlot& slot : robots) {
    if (!slot.annotated.grid.same_as(grid)) {
      throw ConfigError("ImplicitGraph: robots voxelized on different grids");
    }
    if (slot.annotated.node_volumes.size() != slot.annotated.roadmap.nodes.size() ||
        slot.annotated.edge_volumes.size() != slot.annotated.roadmap.edges.size()) {
      throw ConfigError("ImplicitGraph: roadmap annotation incomplete");
    }
  }
}

CompositeState state_of(const ImplicitGraph& graph, const CompositeVertex& v) {
  CompositeState s;
  s.configs.reserve(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    s.configs.push_back(graph.roadmap(i).nodes[v.node_ids[i]]);
  }
  return s;
}

std::vector<double> flatten(const CompositeState& s) {
  std::vector<double> flat;
  for (const Configuration& q : s.configs) {
    flat.insert(flat.end(), q.begin(), q.end());
  }
  return flat;
}

std::vector<double> flat_state_of(const ImplicitGraph& graph,
                                  const CompositeVertex& v) {
  std::vector<double> flat;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const Configuration& q = graph.roadmap(i).nodes[v.node_ids[i]];
    flat.insert(flat.end(), q.begin(), q.end());
  }
  return flat;
}

double flat_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double composite_distance(const CompositeState& a, const CompositeState& b) {
  if (a.configs.size() != b.configs.size()) {
    throw std::invalid_argument("composite_distance: robot count mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.configs.size(); ++i) {
    if (a.configs[i].size() != b.configs[i].size()) {
      throw std::invalid_argument("composite_distance: joint count mismatch");
    }
    for (std::size_t j = 0; j < a.configs[i].size(); ++j) {
      const double d = a.configs[i][j] - b.configs[i][j];
      s += d * d;
    }
  }
  return std::sqrt(s);
}

CompositeState sample_random(const ImplicitGraph& graph, RandomEngine& rng) {
  CompositeState s;
  s.configs.reserve(graph.size());
  for (const RobotSlot& slot : graph.robots) {
    Configuration q(slot.model.num_joints());
    for (std::size_t j = 0; j < q.size(); ++j) {
      q[j] = rng.uniform(slot.model.joint_limits[j].lower,
                         slot.model.joint_limits[j].upper);
    }
    s.configs.push_back(std::move(q));
  }
  return s;
}

bool is_composite_neighbor(const ImplicitGraph& graph, const CompositeVertex& v,
                           const CompositeVertex& w) {
  if (v.node_ids.size() != graph.size() || w.node_ids.size() != graph.size()) {
    return false;
  }
  bool any_move = false;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (v.node_ids[i] == w.node_ids[i]) continue;
    if (!graph.roadmap(i).edge_between(v.node_ids[i], w.node_ids[i])) {
      return false;
    }
    any_move = true;
  }
  return any_move;
}

double edge_cost(const ImplicitGraph& graph, const CompositeVertex& v,
                 const CompositeVertex& w) {
  if (v == w) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (v.node_ids[i] == w.node_ids[i]) continue;
    const auto e = graph.roadmap(i).edge_between(v.node_ids[i], w.node_ids[i]);
    if (!e) {
      throw std::invalid_argument("edge_cost: vertices are not composite neighbors");
    }
    const double c = graph.roadmap(i).edges[*e].cost;
    s += c * c;
  }
  return std::sqrt(s);
}

bool is_edge_valid(const ImplicitGraph& graph, const CompositeVertex& v,
                   const CompositeVertex& w) {
  const std::size_t n = graph.size();
  // Resolve each robot's volume once: edge volume if it moves, else the node
  // volume at its (unchanged) vertex.
  thread_local std::vector<const VoxelSet*> volumes;
  volumes.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const AnnotatedRoadmap& ann = graph.robots[i].annotated;
    if (v.node_ids[i] == w.node_ids[i]) {
      volumes.push_back(&ann.node_volumes[v.node_ids[i]]);
    } else {
      const auto e = ann.roadmap.edge_between(v.node_ids[i], w.node_ids[i]);
      if (!e) {
        throw std::invalid_argument(
            "is_edge_valid: vertices are not composite neighbors");
      }
      volumes.push_back(&ann.edge_volumes[*e]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (voxelsets_intersect(*volumes[i], *volumes[j])) return false;
    }
  }
  return true;
}

}  // namespace fdrrt
