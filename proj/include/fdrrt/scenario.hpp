#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fdrrt/planner.hpp"
#include "fdrrt/sweptvol.hpp"

namespace fdrrt {

struct GridSpec {
  double d_voxel = 0.05;
  std::optional<Box> bounds;  // default: union of reachable bounding boxes
};

struct RobotSpec {
  RobotModel model;
  std::vector<Configuration> targets;    // visit sequence; single entry = any-goal robot
  std::vector<Configuration> waypoints;  // extra roadmap interest points (parking spots)

  /// Targets followed by waypoints; the node set the roadmap is built over.
  std::vector<Configuration> roadmap_targets() const;
};

/// The persisted experiment definition.
struct Scenario {
  std::uint32_t version = 1;
  std::string id;
  std::vector<RobotSpec> robots;
  std::vector<Obstacle> obstacles;
  GridSpec grid;
  RoadmapParams roadmap_params;
  PlannerConfig planner_defaults;

  /// Segments between consecutive target indices: max targets per robot - 1.
  std::size_t segment_count() const;

  /// Throws ConfigError naming the offending field on any violated invariant.
  void validate() const;
};

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

/// Grid from explicit bounds (validated to cover all reachable boxes) or the
/// union of reachable boxes.
VoxelGrid scenario_grid(const Scenario& scenario);

/// Roadmaps for every robot, seeded per robot from the master seed.
std::vector<Roadmap> build_scenario_roadmaps(const Scenario& scenario,
                                             std::uint64_t master_seed);

ImplicitGraph assemble_graph(const Scenario& scenario,
                             std::vector<AnnotatedRoadmap> annotated);

/// Planning problem for one segment: each robot starts at its segment-k
/// target (clamped to its last one) and aims at target k+1, or the any-goal
/// if its sequence is exhausted.
ProblemSpec make_problem(const ImplicitGraph& graph, const Scenario& scenario,
                         std::size_t segment);

}  // namespace fdrrt
