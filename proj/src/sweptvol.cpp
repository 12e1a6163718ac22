#include "fdrrt/sweptvol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fdrrt/errors.hpp"

namespace fdrrt {

Box reachable_bounding_box(const RobotModel& robot) {
  double reach = robot.link_radius;
  for (double len : robot.link_lengths) reach += len;
  return Box{{robot.base.x - reach, robot.base.y - reach},
             {robot.base.x + reach, robot.base.y + reach}};
}

VoxelGrid make_grid_over(const Box& bounds, double d_voxel) {
  if (!(d_voxel > 0.0)) {
    throw std::invalid_argument("make_grid_over: d_voxel must be > 0");
  }
  VoxelGrid grid;
  grid.origin = bounds.min;
  grid.d_voxel = d_voxel;
  grid.nx = static_cast<std::uint32_t>(
      std::max(1.0, std::ceil((bounds.max.x - bounds.min.x) / d_voxel)));
  grid.ny = static_cast<std::uint32_t>(
      std::max(1.0, std::ceil((bounds.max.y - bounds.min.y) / d_voxel)));
  return grid;
}

VoxelGrid make_grid(const std::vector<RobotModel>& robots, double d_voxel) {
  if (robots.empty()) {
    throw std::invalid_argument("make_grid: no robots");
  }
  Box u = reachable_bounding_box(robots[0]);
  for (std::size_t i = 1; i < robots.size(); ++i) {
    const Box b = reachable_bounding_box(robots[i]);
    u.min.x = std::min(u.min.x, b.min.x);
    u.min.y = std::min(u.min.y, b.min.y);
    u.max.x = std::max(u.max.x, b.max.x);
    u.max.y = std::max(u.max.y, b.max.y);
  }
  return make_grid_over(u, d_voxel);
}

namespace {

// Marks every voxel whose center is within radius + half cell diagonal of a
// link axis segment. `scratch` is a grid-sized mark buffer; newly marked
// indices are appended to `out` (so repeated calls union without duplicates).
void mark_config(const RobotModel& robot, const Configuration& q,
                 const VoxelGrid& grid, std::vector<char>& scratch,
                 std::vector<std::uint32_t>& out) {
  const std::vector<Capsule> links = forward_kinematics(robot, q);
  const double half_diag = grid.d_voxel * std::sqrt(2.0) / 2.0;
  const double gx1 = grid.origin.x + grid.nx * grid.d_voxel;
  const double gy1 = grid.origin.y + grid.ny * grid.d_voxel;

  for (const Capsule& link : links) {
    const double lo_x = std::min(link.a.x, link.b.x) - link.radius;
    const double hi_x = std::max(link.a.x, link.b.x) + link.radius;
    const double lo_y = std::min(link.a.y, link.b.y) - link.radius;
    const double hi_y = std::max(link.a.y, link.b.y) + link.radius;
    if (lo_x < grid.origin.x - 1e-9 || hi_x > gx1 + 1e-9 ||
        lo_y < grid.origin.y - 1e-9 || hi_y > gy1 + 1e-9) {
      throw ConfigError("voxelize: robot geometry exits the grid extent");
    }
    const double threshold = link.radius + half_diag;
    auto cell_lo = [&](double w, double o) {
      return static_cast<std::int64_t>(std::floor((w - threshold - o) / grid.d_voxel));
    };
    auto cell_hi = [&](double w, double o) {
      return static_cast<std::int64_t>(std::floor((w + threshold - o) / grid.d_voxel));
    };
    const std::int64_t ix0 = std::max<std::int64_t>(0, cell_lo(std::min(link.a.x, link.b.x) , grid.origin.x));
    const std::int64_t ix1 = std::min<std::int64_t>(grid.nx - 1, cell_hi(std::max(link.a.x, link.b.x), grid.origin.x));
    const std::int64_t iy0 = std::max<std::int64_t>(0, cell_lo(std::min(link.a.y, link.b.y), grid.origin.y));
    const std::int64_t iy1 = std::min<std::int64_t>(grid.ny - 1, cell_hi(std::max(link.a.y, link.b.y), grid.origin.y));

    for (std::int64_t ix = ix0; ix <= ix1; ++ix) {
      for (std::int64_t iy = iy0; iy <= iy1; ++iy) {
        const std::uint32_t idx = grid.index_of(static_cast<std::uint32_t>(ix),
                                                static_cast<std::uint32_t>(iy));
        if (scratch[idx]) continue;
        const Vec2 center{grid.origin.x + (ix + 0.5) * grid.d_voxel,
                          grid.origin.y + (iy + 0.5) * grid.d_voxel};
        if (point_segment_distance(center, link.a, link.b) <= threshold) {
          scratch[idx] = 1;
          out.push_back(idx);
        }
      }
    }
  }
}

}  // namespace

VoxelSet voxelize_config(const RobotModel& robot, const Configuration& q,
                         const VoxelGrid& grid) {
  std::vector<char> scratch(grid.cell_count(), 0);
  VoxelSet vs;
  mark_config(robot, q, grid, scratch, vs.indices);
  std::sort(vs.indices.begin(), vs.indices.end());
  return vs;
}

VoxelSet voxelize_edge(const RobotModel& robot, const Configuration& q_a,
                       const Configuration& q_b, const VoxelGrid& grid,
                       double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("voxelize_edge: delta must be > 0");
  }
  const double dist = config_distance(q_a, q_b);
  std::size_t intervals = 1;
  while (static_cast<double>(intervals) * delta < dist) intervals *= 2;

  std::vector<char> scratch(grid.cell_count(), 0);
  VoxelSet vs;
  Configuration q(q_a.size());
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(intervals);
    for (std::size_t j = 0; j < q.size(); ++j) {
      q[j] = q_a[j] + t * (q_b[j] - q_a[j]);
    }
    mark_config(robot, q, grid, scratch, vs.indices);
  }
  std::sort(vs.indices.begin(), vs.indices.end());
  return vs;
}

double default_edge_delta(const RobotModel& robot, const Configuration& q_a,
                          const Configuration& q_b, double d_voxel) {
  const double dist = config_distance(q_a, q_b);
  if (dist <= 0.0) return d_voxel;  // zero-length edge, any spacing works
  // Workspace displacement of any capsule point under a joint-space move dq
  // is bounded by sum_j |dq_j| * (radius + distal chain length from joint j).
  double sweep = 0.0;
  double distal = robot.link_radius;
  for (double len : robot.link_lengths) distal += len;
  for (std::size_t j = 0; j < robot.num_joints(); ++j) {
    sweep += std::abs(q_a[j] - q_b[j]) * distal;
    distal -= robot.link_lengths[j];
  }
  if (sweep <= 0.0) return d_voxel;
  return dist * (d_voxel / 4.0) / sweep;
}

bool voxelsets_intersect(const VoxelSet& a, const VoxelSet& b) {
  std::size_t i = 0, j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] == b.indices[j]) return true;
    if (a.indices[i] < b.indices[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

AnnotatedRoadmap annotate_roadmap(const RobotModel& robot, Roadmap roadmap,
                                  const VoxelGrid& grid, double delta) {
  AnnotatedRoadmap ann;
  ann.grid = grid;
  ann.node_volumes.reserve(roadmap.nodes.size());
  for (const Configuration& q : roadmap.nodes) {
    ann.node_volumes.push_back(voxelize_config(robot, q, grid));
  }
  ann.edge_volumes.reserve(roadmap.edges.size());
  for (const RoadmapEdge& e : roadmap.edges) {
    const Configuration& qa = roadmap.nodes[e.u];
    const Configuration& qb = roadmap.nodes[e.v];
    const double d =
        delta > 0.0 ? delta : default_edge_delta(robot, qa, qb, grid.d_voxel);
    ann.edge_volumes.push_back(voxelize_edge(robot, qa, qb, grid, d));
  }
  ann.roadmap = std::move(roadmap);
  return ann;
}

}  // namespace fdrrt
