#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fdrrt/bench.hpp"
#include "fdrrt/errors.hpp"
#include "test_helpers.hpp"

using namespace fdrrt;

namespace {

std::string fixture(const std::string& name) {
  return std::string(FDRRT_SCENARIO_DIR) + "/" + name;
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

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("load_scenario: bundled corridor fixture loads with two robots") {
  const Scenario s = load_scenario(fixture("deadlock_corridor.json"));
  CHECK(s.robots.size() == 2);
  CHECK(s.id == "deadlock_corridor");
  CHECK(s.segment_count() == 1);
  CHECK(s.robots[1].waypoints.size() == 1);
}

TEST_CASE("load_scenario: target inside an obstacle names robot and target") {
  const char* bad = R"({
    "version": 1, "id": "bad",
    "robots": [
      {"base": [0,0], "link_lengths": [1.0], "link_radius": 0.08,
       "joint_limits": [[-2.6,2.6]], "targets": [[0.0],[1.0]]},
      {"base": [5,0], "link_lengths": [1.0], "link_radius": 0.08,
       "joint_limits": [[-2.6,2.6]], "targets": [[0.0]]}
    ],
    "obstacles": [{"type": "disc", "center": [0.5, 0.0], "radius": 0.2}]
  })";
  const std::string path = "./bad_scenario_tmp.json";
  std::ofstream(path) << bad;
  try {
    load_scenario(path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("robot 0") != std::string::npos);
    CHECK(what.find("target 0") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("load_scenario: missing version and uncovered grid are rejected") {
  const std::string path = "./bad_scenario_tmp2.json";
  std::ofstream(path) << R"({"robots": []})";
  CHECK_THROWS_AS(load_scenario(path), ConfigError);

  Scenario s = load_scenario(fixture("deadlock_corridor.json"));
  s.grid.bounds = Box{{-0.5, -0.5}, {0.5, 0.5}};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("scenario save/load round trip") {
  const Scenario s = load_scenario(fixture("deadlock_corridor.json"));
  const std::string path = "./roundtrip_scenario_tmp.json";
  save_scenario(s, path);
  const Scenario t = load_scenario(path);
  CHECK(t.id == s.id);
  REQUIRE(t.robots.size() == s.robots.size());
  for (std::size_t i = 0; i < s.robots.size(); ++i) {
    CHECK(t.robots[i].model.base.x == s.robots[i].model.base.x);
    CHECK(t.robots[i].targets == s.robots[i].targets);
    CHECK(t.robots[i].waypoints == s.robots[i].waypoints);
  }
  CHECK(t.grid.d_voxel == s.grid.d_voxel);
  CHECK(t.planner_defaults.max_iterations == s.planner_defaults.max_iterations);
  std::remove(path.c_str());
}

TEST_CASE("make_problem derives segment starts, goals and any-goals") {
  const Scenario s = load_scenario(fixture("deadlock_corridor.json"));
  const ImplicitGraph graph = precompute(s);
  const ProblemSpec problem = make_problem(graph, s, 0);
  CHECK(problem.start.node_ids[0] == graph.roadmap(0).target_ids[0]);
  CHECK_FALSE(problem.goals[0].any_goal);
  CHECK(problem.goals[0].nodes ==
        std::vector<NodeId>{graph.roadmap(0).target_ids[1]});
  CHECK(problem.goals[1].any_goal);
  CHECK_THROWS_AS(make_problem(graph, s, 1), ConfigError);
}

TEST_CASE("run_segment_experiment: single run on the corridor solves") {
  const Scenario s = load_scenario(fixture("deadlock_corridor.json"));
  const ImplicitGraph graph = precompute(s);
  BenchOptions options;
  options.n_runs = 1;
  options.budget_s = 0.005;
  options.synthetic_ns_per_iteration = 1000;
  const auto records = run_segment_experiment(s, &graph, 0, options);
  REQUIRE(records.size() == 2);  // fast + drrt
  for (const RunRecord& r : records) {
    CHECK(r.solved);
    CHECK(r.cost_first > 0.0);
    CHECK(r.segment == 0);
  }
  CHECK(records[0].mode == "fast");
  CHECK(records[1].mode == "drrt");
}

TEST_CASE("run_segment_experiment requires precomputation unless perturbing") {
  const Scenario s = load_scenario(fixture("deadlock_corridor.json"));
  BenchOptions options;
  options.n_runs = 1;
  CHECK_THROWS_AS(run_segment_experiment(s, nullptr, 0, options), ConfigError);
}

TEST_CASE("summarize matches hand-computed aggregates") {
  std::vector<RunRecord> records;
  RunRecord a;
  a.scenario_id = "x";
  a.segment = 0;
  a.mode = "fast";
  a.seed = 1;
  a.solved = true;
  a.time_to_first_ns = 2000000;  // 2 ms
  a.cost_first = 10.0;
  a.cost_at_budget = 8.0;
  RunRecord b = a;
  b.seed = 2;
  b.time_to_first_ns = 6000000;  // 6 ms
  b.cost_first = 20.0;
  b.cost_at_budget.reset();
  RunRecord c = a;
  c.seed = 3;
  c.solved = false;
  records = {a, b, c};
  const auto rows = summarize(records);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].runs == 3);
  CHECK(rows[0].solved == 2);
  CHECK(rows[0].mean_time_first_ms == doctest::Approx(4.0));
  CHECK(rows[0].worst_time_first_ms == doctest::Approx(6.0));
  CHECK(rows[0].mean_cost_first == doctest::Approx(15.0));
  CHECK(rows[0].solved_by_budget == 1);
  CHECK(rows[0].mean_cost_at_budget == doctest::Approx(8.0));
}

TEST_CASE("perturb_targets: sigma zero is identity, results stay valid") {
  const Scenario s = load_scenario(fixture("deadlock_corridor.json"));
  RandomEngine rng(9);
  const Scenario zero = perturb_targets(s, 0.0, rng);
  for (std::size_t i = 0; i < s.robots.size(); ++i) {
    CHECK(zero.robots[i].targets == s.robots[i].targets);
  }
  for (int trial = 0; trial < 50; ++trial) {
    const Scenario p = perturb_targets(s, 0.1, rng);
    for (std::size_t i = 0; i < p.robots.size(); ++i) {
      for (const Configuration& t : p.robots[i].targets) {
        CHECK(within_joint_limits(p.robots[i].model, t));
        CHECK_FALSE(config_collides(p.robots[i].model, t, p.obstacles));
      }
      CHECK(p.robots[i].waypoints == s.robots[i].waypoints);
    }
  }
}

TEST_CASE("perturb_targets: magnitudes follow half-normal statistics") {
  const Scenario s = load_scenario(fixture("deadlock_corridor.json"));
  RandomEngine rng(41);
  const double sigma = 0.05;
  double sum_abs = 0.0;
  int n = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const Scenario p = perturb_targets(s, sigma, rng);
    for (std::size_t i = 0; i < p.robots.size(); ++i) {
      for (std::size_t t = 0; t < p.robots[i].targets.size(); ++t) {
        for (std::size_t j = 0; j < p.robots[i].targets[t].size(); ++j) {
          sum_abs += std::abs(p.robots[i].targets[t][j] - s.robots[i].targets[t][j]);
          ++n;
        }
      }
    }
  }
  const double mean_abs = sum_abs / n;
  const double expected = sigma * std::sqrt(2.0 / 3.14159265358979);  // ~0.0399
  CHECK(std::abs(mean_abs - expected) < 0.004);
}

TEST_CASE("emit_results: degenerate single record, histogram sums, determinism") {
  RunRecord r;
  r.scenario_id = "solo";
  r.segment = 0;
  r.mode = "fast";
  r.seed = 1;
  r.solved = true;
  r.time_to_first_ns = 3000000;
  r.cost_first = 5.5;
  r.cost_at_budget = 5.0;

  const std::string dir = "./emit_tmp";
  std::filesystem::create_directories(dir);
  emit_results({r}, dir);
  const auto rows = summarize({r});
  CHECK(rows[0].mean_time_first_ms == rows[0].worst_time_first_ms);

  // Histogram bins sum to the solved count.
  std::ifstream hist(dir + "/hist_time.csv");
  std::string line;
  std::getline(hist, line);  // header
  int total = 0;
  int lines = 0;
  while (std::getline(hist, line)) {
    total += std::stoi(line.substr(line.rfind(',') + 1));
    ++lines;
  }
  CHECK(total == 1);
  CHECK(lines == 20);

  const std::string first_runs = slurp(dir + "/runs.csv");
  const std::string first_summary = slurp(dir + "/summary.csv");
  emit_results({r}, dir);
  CHECK(slurp(dir + "/runs.csv") == first_runs);
  CHECK(slurp(dir + "/summary.csv") == first_summary);

  CHECK_THROWS_AS(emit_results({}, dir), std::invalid_argument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("full pipeline bytes are reproducible under the synthetic clock") {
  const Scenario s = load_scenario(fixture("deadlock_corridor.json"));
  auto run_once = [&](const std::string& dir) {
    const ImplicitGraph graph = precompute(s, 7);
    BenchOptions options;
    options.n_runs = 4;
    options.master_seed = 99;
    options.budget_s = 0.002;
    options.synthetic_ns_per_iteration = 500;
    const auto records = run_segment_experiment(s, &graph, 0, options);
    std::filesystem::create_directories(dir);
    emit_results(records, dir);
  };
  run_once("./pipe_a");
  run_once("./pipe_b");
  for (const char* name : {"runs.csv", "summary.csv", "hist_time.csv", "hist_cost.csv"}) {
    CHECK(slurp(std::string("./pipe_a/") + name) ==
          slurp(std::string("./pipe_b/") + name));
  }
  std::filesystem::remove_all("./pipe_a");
  std::filesystem::remove_all("./pipe_b");
}
