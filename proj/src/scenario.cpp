#include "fdrrt/scenario.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "fdrrt/errors.hpp"

namespace fdrrt {

using nlohmann::json;

std::vector<Configuration> RobotSpec::roadmap_targets() const {
  std::vector<Configuration> all = targets;
  all.insert(all.end(), waypoints.begin(), waypoints.end());
  return all;
}

std::size_t Scenario::segment_count() const {
  std::size_t max_targets = 0;
  for (const RobotSpec& r : robots) {
    max_targets = std::max(max_targets, r.targets.size());
  }
  return max_targets > 0 ? max_targets - 1 : 0;
}

void Scenario::validate() const {
  if (robots.size() < 2) {
    throw ConfigError("scenario: at least 2 robots required (robots)");
  }
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const RobotSpec& r = robots[i];
    try {
      r.model.validate();
    } catch (const std::exception& e) {
      throw ConfigError("scenario: robot " + std::to_string(i) + ": " + e.what());
    }
    if (r.targets.empty()) {
      throw ConfigError("scenario: robot " + std::to_string(i) +
                        " needs at least one target (targets)");
    }
    auto check_config = [&](const Configuration& q, const std::string& what,
                            std::size_t k) {
      if (q.size() != r.model.num_joints()) {
        throw ConfigError("scenario: robot " + std::to_string(i) + " " + what +
                          " " + std::to_string(k) + " has wrong joint count");
      }
      if (!within_joint_limits(r.model, q)) {
        throw ConfigError("scenario: robot " + std::to_string(i) + " " + what +
                          " " + std::to_string(k) + " violates joint limits");
      }
      if (config_collides(r.model, q, obstacles)) {
        throw ConfigError("scenario: robot " + std::to_string(i) + " " + what +
                          " " + std::to_string(k) + " collides with an obstacle");
      }
    };
    for (std::size_t k = 0; k < r.targets.size(); ++k) {
      check_config(r.targets[k], "target", k);
    }
    for (std::size_t k = 0; k < r.waypoints.size(); ++k) {
      check_config(r.waypoints[k], "waypoint", k);
    }
  }
  if (segment_count() == 0) {
    throw ConfigError("scenario: no robot has more than one target, nothing to plan");
  }
  if (!(grid.d_voxel > 0.0)) {
    throw ConfigError("scenario: grid.d_voxel must be > 0");
  }
  if (grid.bounds) {
    for (std::size_t i = 0; i < robots.size(); ++i) {
      const Box b = reachable_bounding_box(robots[i].model);
      if (b.min.x < grid.bounds->min.x || b.min.y < grid.bounds->min.y ||
          b.max.x > grid.bounds->max.x || b.max.y > grid.bounds->max.y) {
        throw ConfigError("scenario: grid.bounds does not cover robot " +
                          std::to_string(i) + "'s reachable box");
      }
    }
  }
}

namespace {

Vec2 parse_vec2(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError("scenario: " + field + " must be a [x, y] pair");
  }
  return Vec2{j[0].get<double>(), j[1].get<double>()};
}

Configuration parse_config(const json& j) {
  Configuration q;
  for (const auto& v : j) q.push_back(v.get<double>());
  return q;
}

json config_to_json(const Configuration& q) { return json(q); }

}  // namespace

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("scenario: cannot open " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("scenario: invalid JSON in " + path + ": " + e.what());
  }

  Scenario s;
  try {
    if (!j.contains("version")) throw ConfigError("scenario: missing version");
    s.version = j.at("version").get<std::uint32_t>();
    if (s.version != 1) {
      throw ConfigError("scenario: unsupported version " + std::to_string(s.version));
    }
    s.id = j.value("id", std::string("unnamed"));

    for (const auto& jr : j.at("robots")) {
      RobotSpec r;
      r.model.base = parse_vec2(jr.at("base"), "robots[].base");
      for (const auto& v : jr.at("link_lengths")) {
        r.model.link_lengths.push_back(v.get<double>());
      }
      r.model.link_radius = jr.at("link_radius").get<double>();
      for (const auto& lim : jr.at("joint_limits")) {
        r.model.joint_limits.push_back(
            JointLimit{lim[0].get<double>(), lim[1].get<double>()});
      }
      for (const auto& t : jr.at("targets")) r.targets.push_back(parse_config(t));
      if (jr.contains("waypoints")) {
        for (const auto& w : jr.at("waypoints")) {
          r.waypoints.push_back(parse_config(w));
        }
      }
      s.robots.push_back(std::move(r));
    }

    if (j.contains("obstacles")) {
      for (const auto& jo : j.at("obstacles")) {
        const std::string type = jo.at("type").get<std::string>();
        if (type == "disc") {
          s.obstacles.push_back(Obstacle::disc(
              parse_vec2(jo.at("center"), "obstacles[].center"),
              jo.at("radius").get<double>()));
        } else if (type == "rect") {
          s.obstacles.push_back(
              Obstacle::rect(parse_vec2(jo.at("min"), "obstacles[].min"),
                             parse_vec2(jo.at("max"), "obstacles[].max")));
        } else {
          throw ConfigError("scenario: unknown obstacle type '" + type + "'");
        }
      }
    }

    if (j.contains("grid")) {
      const auto& jg = j.at("grid");
      s.grid.d_voxel = jg.value("d_voxel", 0.05);
      if (jg.contains("bounds")) {
        s.grid.bounds = Box{parse_vec2(jg.at("bounds").at("min"), "grid.bounds.min"),
                            parse_vec2(jg.at("bounds").at("max"), "grid.bounds.max")};
      }
    }

    if (j.contains("roadmap")) {
      const auto& jm = j.at("roadmap");
      s.roadmap_params.rrt_step = jm.value("rrt_step", s.roadmap_params.rrt_step);
      s.roadmap_params.rrt_max_iters =
          jm.value("rrt_max_iters", s.roadmap_params.rrt_max_iters);
      s.roadmap_params.rrt_retries =
          jm.value("rrt_retries", s.roadmap_params.rrt_retries);
      s.roadmap_params.shortcut_rounds =
          jm.value("shortcut_rounds", s.roadmap_params.shortcut_rounds);
      s.roadmap_params.merge_tolerance =
          jm.value("merge_tolerance", s.roadmap_params.merge_tolerance);
      s.roadmap_params.validity_step =
          jm.value("validity_step", s.roadmap_params.validity_step);
    }

    s.planner_defaults.max_iterations = 100000;
    if (j.contains("planner")) {
      const auto& jp = j.at("planner");
      if (jp.contains("max_iterations")) {
        s.planner_defaults.max_iterations = jp.at("max_iterations").get<std::uint64_t>();
      }
      if (jp.contains("time_limit_s")) {
        s.planner_defaults.time_limit_s = jp.at("time_limit_s").get<double>();
      }
      const std::string rule = jp.value("expansion_rule", "random");
      if (rule == "random") {
        s.planner_defaults.expansion_rule = ExpansionRule::RandomNeighbor;
      } else if (rule == "direction") {
        s.planner_defaults.expansion_rule = ExpansionRule::DirectionOracle;
      } else {
        throw ConfigError("scenario: unknown expansion_rule '" + rule + "'");
      }
      s.planner_defaults.seed = jp.value("seed", std::uint64_t{1});
    }
  } catch (const json::exception& e) {
    throw ConfigError("scenario: " + path + ": " + e.what());
  }

  s.validate();
  return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
  json j;
  j["version"] = s.version;
  j["id"] = s.id;
  j["robots"] = json::array();
  for (const RobotSpec& r : s.robots) {
    json jr;
    jr["base"] = {r.model.base.x, r.model.base.y};
    jr["link_lengths"] = r.model.link_lengths;
    jr["link_radius"] = r.model.link_radius;
    jr["joint_limits"] = json::array();
    for (const JointLimit& lim : r.model.joint_limits) {
      jr["joint_limits"].push_back({lim.lower, lim.upper});
    }
    jr["targets"] = json::array();
    for (const Configuration& t : r.targets) jr["targets"].push_back(config_to_json(t));
    if (!r.waypoints.empty()) {
      jr["waypoints"] = json::array();
      for (const Configuration& w : r.waypoints) {
        jr["waypoints"].push_back(config_to_json(w));
      }
    }
    j["robots"].push_back(std::move(jr));
  }
  j["obstacles"] = json::array();
  for (const Obstacle& o : s.obstacles) {
    json jo;
    if (o.kind == Obstacle::Kind::Disc) {
      jo["type"] = "disc";
      jo["center"] = {o.center.x, o.center.y};
      jo["radius"] = o.radius;
    } else {
      jo["type"] = "rect";
      jo["min"] = {o.min_corner.x, o.min_corner.y};
      jo["max"] = {o.max_corner.x, o.max_corner.y};
    }
    j["obstacles"].push_back(std::move(jo));
  }
  j["grid"]["d_voxel"] = s.grid.d_voxel;
  if (s.grid.bounds) {
    j["grid"]["bounds"]["min"] = {s.grid.bounds->min.x, s.grid.bounds->min.y};
    j["grid"]["bounds"]["max"] = {s.grid.bounds->max.x, s.grid.bounds->max.y};
  }
  j["roadmap"] = {{"rrt_step", s.roadmap_params.rrt_step},
                  {"rrt_max_iters", s.roadmap_params.rrt_max_iters},
                  {"rrt_retries", s.roadmap_params.rrt_retries},
                  {"shortcut_rounds", s.roadmap_params.shortcut_rounds},
                  {"merge_tolerance", s.roadmap_params.merge_tolerance},
                  {"validity_step", s.roadmap_params.validity_step}};
  json jp;
  if (s.planner_defaults.max_iterations) {
    jp["max_iterations"] = *s.planner_defaults.max_iterations;
  }
  if (s.planner_defaults.time_limit_s) {
    jp["time_limit_s"] = *s.planner_defaults.time_limit_s;
  }
  jp["expansion_rule"] =
      s.planner_defaults.expansion_rule == ExpansionRule::DirectionOracle
          ? "direction"
          : "random";
  jp["seed"] = s.planner_defaults.seed;
  j["planner"] = std::move(jp);

  std::ofstream out(path);
  if (!out) {
    throw ConfigError("scenario: cannot write " + path);
  }
  out << j.dump(2) << "\n";
}

VoxelGrid scenario_grid(const Scenario& scenario) {
  if (scenario.grid.bounds) {
    return make_grid_over(*scenario.grid.bounds, scenario.grid.d_voxel);
  }
  std::vector<RobotModel> models;
  models.reserve(scenario.robots.size());
  for (const RobotSpec& r : scenario.robots) models.push_back(r.model);
  return make_grid(models, scenario.grid.d_voxel);
}

std::vector<Roadmap> build_scenario_roadmaps(const Scenario& scenario,
                                             std::uint64_t master_seed) {
  std::vector<Roadmap> roadmaps;
  roadmaps.reserve(scenario.robots.size());
  for (std::size_t i = 0; i < scenario.robots.size(); ++i) {
    RandomEngine rng(mix_seed(master_seed, 0x524d4150u + i));
    roadmaps.push_back(build_roadmap(scenario.robots[i].model,
                                     scenario.robots[i].roadmap_targets(),
                                     scenario.obstacles, scenario.roadmap_params,
                                     rng));
  }
  return roadmaps;
}

ImplicitGraph assemble_graph(const Scenario& scenario,
                             std::vector<AnnotatedRoadmap> annotated) {
  if (annotated.size() != scenario.robots.size()) {
    throw ConfigError("assemble_graph: one annotated roadmap per robot required");
  }
  ImplicitGraph graph;
  graph.robots.reserve(annotated.size());
  for (std::size_t i = 0; i < annotated.size(); ++i) {
    graph.robots.push_back(RobotSlot{scenario.robots[i].model, std::move(annotated[i])});
  }
  graph.validate();
  return graph;
}

ProblemSpec make_problem(const ImplicitGraph& graph, const Scenario& scenario,
                         std::size_t segment) {
  if (segment >= scenario.segment_count()) {
    throw ConfigError("make_problem: segment " + std::to_string(segment) +
                      " out of range (scenario has " +
                      std::to_string(scenario.segment_count()) + ")");
  }
  ProblemSpec problem;
  problem.start.node_ids.resize(graph.size());
  problem.goals.resize(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const RobotSpec& r = scenario.robots[i];
    const Roadmap& rm = graph.roadmap(i);
    const std::size_t last = r.targets.size() - 1;
    problem.start.node_ids[i] = rm.target_ids[std::min(segment, last)];
    if (segment + 1 <= last) {
      problem.goals[i] = GoalSpec::at({rm.target_ids[segment + 1]});
    } else {
      problem.goals[i] = GoalSpec::any();
    }
  }
  problem.validate(graph);
  return problem;
}

}  // namespace fdrrt
