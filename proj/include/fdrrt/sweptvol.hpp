#pragma once

#include <cstdint>
#include <vector>

#include "fdrrt/geom.hpp"
#include "fdrrt/roadmap.hpp"

namespace fdrrt {

struct Box {
  Vec2 min;
  Vec2 max;
};

/// Shared workspace grid; all robots voxelize into the same index space so
/// cross-robot collision checks reduce to integer set intersection.
struct VoxelGrid {
  Vec2 origin;
  double d_voxel = 0.05;
  std::uint32_t nx = 0;
  std::uint32_t ny = 0;

  std::uint64_t cell_count() const {
    return static_cast<std::uint64_t>(nx) * ny;
  }
  std::uint32_t index_of(std::uint32_t ix, std::uint32_t iy) const {
    return ix * ny + iy;
  }
  Vec2 center_of(std::uint32_t index) const {
    const std::uint32_t ix = index / ny;
    const std::uint32_t iy = index % ny;
    return {origin.x + (ix + 0.5) * d_voxel, origin.y + (iy + 0.5) * d_voxel};
  }
  bool same_as(const VoxelGrid& o) const {
    return origin.x == o.origin.x && origin.y == o.origin.y &&
           d_voxel == o.d_voxel && nx == o.nx && ny == o.ny;
  }
};

/// Sorted, duplicate-free linearized voxel indices.
struct VoxelSet {
  std::vector<std::uint32_t> indices;

  bool empty() const { return indices.empty(); }
  std::size_t size() const { return indices.size(); }
  bool operator==(const VoxelSet& o) const { return indices == o.indices; }
};

/// Box guaranteed to contain every link point at every configuration:
/// centered on the base, half-extent = sum of link lengths + link radius.
Box reachable_bounding_box(const RobotModel& robot);

/// Grid covering the union of all robots' reachable boxes.
VoxelGrid make_grid(const std::vector<RobotModel>& robots, double d_voxel);
VoxelGrid make_grid_over(const Box& bounds, double d_voxel);

/// Voxels whose center lies within link_radius + half cell diagonal of some
/// link axis segment (conservative superset of the occupied region).
/// Throws ConfigError if the robot geometry exits the grid extent.
VoxelSet voxelize_config(const RobotModel& robot, const Configuration& q,
                         const VoxelGrid& grid);

/// Union of voxelize_config over configurations spaced <= delta along the
/// straight segment q_a -> q_b, endpoints included. Sample counts are powers
/// of two so refining delta only ever adds sample points.
VoxelSet voxelize_edge(const RobotModel& robot, const Configuration& q_a,
                       const Configuration& q_b, const VoxelGrid& grid,
                       double delta);

/// Config-space sample spacing for which the workspace displacement between
/// successive edge samples stays below d_voxel/4, using the per-joint bound
/// |dq_j| * (link radius + distal chain length from joint j).
double default_edge_delta(const RobotModel& robot, const Configuration& q_a,
                          const Configuration& q_b, double d_voxel);

/// Linear merge scan over the two sorted index lists.
bool voxelsets_intersect(const VoxelSet& a, const VoxelSet& b);

struct AnnotatedRoadmap {
  Roadmap roadmap;
  VoxelGrid grid;
  std::vector<VoxelSet> node_volumes;  // per node
  std::vector<VoxelSet> edge_volumes;  // per edge
};

/// Precomputes node and edge swept volumes for the whole roadmap.
/// delta <= 0 selects the per-edge default spacing.
AnnotatedRoadmap annotate_roadmap(const RobotModel& robot, Roadmap roadmap,
                                  const VoxelGrid& grid, double delta = 0.0);

}  // namespace fdrrt
