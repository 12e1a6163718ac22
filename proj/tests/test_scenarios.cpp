#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fdrrt/bench.hpp"
#include "fdrrt/oracle.hpp"
#include "test_helpers.hpp"

using namespace fdrrt;

namespace {

std::string fixture(const std::string& name) {
  return std::string(FDRRT_SCENARIO_DIR) + "/" + name + ".json";
}

ImplicitGraph precompute(const Scenario& scenario, std::uint64_t seed = 1) {
  const VoxelGrid grid = scenario_grid(scenario);
  std::vector<Roadmap> roadmaps = build_scenario_roadmaps(scenario, seed);
  std::vector<AnnotatedRoadmap> annotated;
  for (std::size_t i = 0; i < roadmaps.size(); ++i) {
    annotated.push_back(
        annotate_roadmap(scenario.robots[i].model, std::move(roadmaps[i]), grid));
  }
  return assemble_graph(scenario, std::move(annotated));
}

void check_scenario(const std::string& name, std::size_t expect_robots) {
  CAPTURE(name);
  const Scenario scenario = load_scenario(fixture(name));
  CHECK(scenario.robots.size() == expect_robots);
  const ImplicitGraph graph = precompute(scenario);

  std::uint64_t product = 1;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    CHECK(revalidate_roadmap(scenario.robots[i].model, graph.roadmap(i),
                             scenario.obstacles,
                             scenario.roadmap_params.validity_step));
    product *= graph.roadmap(i).nodes.size();
  }
  CAPTURE(product);
  CHECK(product <= kDefaultExplicitCap);

  const ExplicitProductGraph explicit_graph = build_explicit(graph);
  for (std::size_t segment = 0; segment < scenario.segment_count(); ++segment) {
    CAPTURE(segment);
    const ProblemSpec problem = make_problem(graph, scenario, segment);
    const OracleResult oracle = optimal_cost(
        explicit_graph, problem.start,
        [&](const CompositeVertex& v) { return goal_satisfied(problem, v); });
    REQUIRE(std::isfinite(oracle.cost));

    PlannerConfig cfg = scenario.planner_defaults;
    cfg.seed = 1;
    cfg.stop_at_first_solution = true;
    const PlanResult res = plan(graph, problem, cfg);
    CHECK(res.stats.solved);
    CHECK(res.best_cost >= oracle.cost - 1e-9);
  }
}

}  // namespace

TEST_CASE("bundled scenario: deadlock_corridor") {
  check_scenario("deadlock_corridor", 2);
}

TEST_CASE("bundled scenario: deadlock_table") { check_scenario("deadlock_table", 4); }

TEST_CASE("bundled scenario: narrow_passage") { check_scenario("narrow_passage", 3); }

TEST_CASE("bundled scenario: multi_target") { check_scenario("multi_target", 2); }

TEST_CASE("bundled scenario: pick_place") { check_scenario("pick_place", 2); }
