#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "fdrrt/errors.hpp"
#include "fdrrt/oracle.hpp"
#include "fdrrt/planner.hpp"
#include "test_helpers.hpp"

using namespace fdrrt;

namespace {

// 2x2 product of two far-apart one-link robots; every move is valid.
ImplicitGraph two_by_two() {
  const RobotModel a = test::one_link({0, 0});
  const RobotModel b = test::one_link({10, 0});
  return test::make_graph({{a, test::make_roadmap({{-0.5}, {0.5}}, {{0, 1}})},
                           {b, test::make_roadmap({{-0.5}, {0.5}}, {{0, 1}})}});
}

}  // namespace

TEST_CASE("build_explicit: hand enumeration of the 2x2 lattice") {
  const ImplicitGraph graph = two_by_two();
  const ExplicitProductGraph ex = build_explicit(graph);
  CHECK(ex.vertex_count == 4);
  // Moves from (0,0): single movers (1,0), (0,1) cost 1, joint (1,1) cost
  // sqrt(2). All-stay excluded.
  const std::uint64_t origin = ex.index_of(CompositeVertex{{0, 0}});
  REQUIRE(ex.adjacency[origin].size() == 3);
  double joint_cost = 0.0;
  for (const auto& [w, c] : ex.adjacency[origin]) {
    if (w == ex.index_of(CompositeVertex{{1, 1}})) joint_cost = c;
  }
  CHECK(joint_cost == doctest::Approx(std::sqrt(2.0)));

  // Undirected symmetry.
  for (std::uint64_t u = 0; u < ex.vertex_count; ++u) {
    for (const auto& [w, c] : ex.adjacency[u]) {
      bool back = false;
      for (const auto& [x, c2] : ex.adjacency[w]) {
        back = back || (x == u && c2 == c);
      }
      CHECK(back);
    }
  }
}

TEST_CASE("build_explicit: disconnected roadmap leaves product vertices unreachable") {
  const RobotModel a = test::one_link({0, 0}, 1.0, 0.08, -2.6, 5.2);
  const RobotModel b = test::one_link({10, 0});
  Roadmap broken = test::make_roadmap({{-0.5}, {0.5}, {2.5}}, {{0, 1}});  // 2 isolated
  const ImplicitGraph graph = test::make_graph(
      {{a, std::move(broken)}, {b, test::make_roadmap({{-0.5}, {0.5}}, {{0, 1}})}});
  const ExplicitProductGraph ex = build_explicit(graph);
  const OracleResult res =
      optimal_cost(ex, CompositeVertex{{0, 0}}, [&](const CompositeVertex& v) {
        return v.node_ids[0] == 2;
      });
  CHECK(std::isinf(res.cost));
  CHECK(res.path.empty());
}

TEST_CASE("build_explicit: refuses products beyond the cap") {
  const ImplicitGraph graph = two_by_two();
  CHECK_THROWS_AS(build_explicit(graph, 3), ConfigError);
}

TEST_CASE("optimal_cost: start satisfying the goal costs zero") {
  const ImplicitGraph graph = two_by_two();
  const ExplicitProductGraph ex = build_explicit(graph);
  const OracleResult res = optimal_cost(
      ex, CompositeVertex{{1, 0}}, [](const CompositeVertex&) { return true; });
  CHECK(res.cost == 0.0);
  REQUIRE(res.path.size() == 1);
}

TEST_CASE("optimal_cost: single-node second robot reduces to roadmap Dijkstra") {
  const RobotModel a = test::one_link({0, 0});
  const RobotModel b = test::one_link({10, 0});
  Roadmap path_rm =
      test::make_roadmap({{-1.0}, {-0.2}, {0.9}, {1.6}}, {{0, 1}, {1, 2}, {2, 3}});
  const ImplicitGraph graph = test::make_graph(
      {{a, std::move(path_rm)}, {b, test::make_roadmap({{0.0}}, {})}});
  const ExplicitProductGraph ex = build_explicit(graph);
  const OracleResult res =
      optimal_cost(ex, CompositeVertex{{0, 0}}, [](const CompositeVertex& v) {
        return v.node_ids[0] == 3;
      });
  CHECK(res.cost == doctest::Approx(2.6));  // |-1 -> 1.6| along the path
  CHECK(res.path.size() == 4);
}

TEST_CASE("optimal_cost is a lower bound for planner results, reached eventually") {
  const ImplicitGraph graph = test::corridor_graph();
  const ProblemSpec problem = test::corridor_problem();
  const ExplicitProductGraph ex = build_explicit(graph);
  const OracleResult oracle = optimal_cost(
      ex, problem.start,
      [&](const CompositeVertex& v) { return goal_satisfied(problem, v); });
  REQUIRE(std::isfinite(oracle.cost));

  bool reached = false;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    PlannerConfig cfg;
    cfg.max_iterations = 30000;
    cfg.seed = seed;
    const PlanResult res = plan(graph, problem, cfg);
    REQUIRE(res.stats.solved);
    CHECK(res.best_cost >= oracle.cost - 1e-9);
    reached = reached || std::abs(res.best_cost - oracle.cost) <= 1e-9;
  }
  CHECK(reached);
}

TEST_CASE("exact_swept_overlap: disjoint boxes, corridor, symmetry") {
  const RobotModel far_a = test::one_link({0, 0});
  const RobotModel far_b = test::one_link({10, 0});
  const Motion swing{{-1.0}, {1.0}};
  CHECK_FALSE(exact_swept_overlap(far_a, swing, far_b, swing, 0.05));

  const RobotModel mover = test::one_link({0, 0});
  const RobotModel blocker = test::one_link({1.5, 0}, 1.0, 0.08, 0.5, 3.2);
  const Motion cross{{-1.2}, {1.2}};
  const Motion rest = Motion::stay({3.141592653589793});
  CHECK(exact_swept_overlap(mover, cross, blocker, rest, 0.05));
  CHECK(exact_swept_overlap(mover, cross, blocker, rest, 0.005));  // finer check
  CHECK(exact_swept_overlap(blocker, rest, mover, cross, 0.05));   // symmetric

  const Motion parked = Motion::stay({1.5707963267948966});
  CHECK_FALSE(exact_swept_overlap(mover, cross, blocker, parked, 0.05));
}

TEST_CASE("voxel validity is conservative versus the exact oracle") {
  // Random close-quarters instances: whenever the exact dense sweep reports
  // overlap, the voxel check must reject the edge.
  RandomEngine rng(23);
  int exact_hits = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const RobotModel a = test::one_link({0, 0}, 1.0, 0.08, -3.0, 3.0);
    const RobotModel b =
        test::one_link({rng.uniform(1.2, 2.2), rng.uniform(-0.5, 0.5)}, 1.0, 0.08,
                       -3.0, 3.0);
    Roadmap rm_a = test::make_roadmap(
        {{rng.uniform(-3, 3)}, {rng.uniform(-3, 3)}}, {{0, 1}});
    Roadmap rm_b = test::make_roadmap(
        {{rng.uniform(-3, 3)}, {rng.uniform(-3, 3)}}, {{0, 1}});
    const Configuration a0 = rm_a.nodes[0], a1 = rm_a.nodes[1];
    const Configuration b0 = rm_b.nodes[0], b1 = rm_b.nodes[1];
    const ImplicitGraph graph =
        test::make_graph({{a, std::move(rm_a)}, {b, std::move(rm_b)}});

    const double step =
        default_edge_delta(a, a0, a1, graph.robots[0].annotated.grid.d_voxel) / 2;
    const bool exact =
        exact_swept_overlap(a, Motion{a0, a1}, b, Motion{b0, b1}, step);
    const bool valid =
        is_edge_valid(graph, CompositeVertex{{0, 0}}, CompositeVertex{{1, 1}});
    if (exact) {
      ++exact_hits;
      CHECK_FALSE(valid);
    }
  }
  CHECK(exact_hits > 5);  // the draw exercises real overlaps
}
