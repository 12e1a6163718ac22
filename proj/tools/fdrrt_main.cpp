// Command-line front end: precompute roadmaps and swept volumes, plan single
// segments, run benchmark experiments, and query the explicit-graph oracle.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdrrt/artifact_io.hpp"
#include "fdrrt/bench.hpp"
#include "fdrrt/errors.hpp"
#include "fdrrt/oracle.hpp"
#include "fdrrt/scenario.hpp"

namespace {

using namespace fdrrt;

struct LoadedPipeline {
  Scenario scenario;
  ImplicitGraph graph;
};

LoadedPipeline load_pipeline(const std::string& dir) {
  LoadedPipeline p;
  p.scenario = load_scenario(dir + "/scenario.json");
  std::vector<AnnotatedRoadmap> annotated;
  annotated.reserve(p.scenario.robots.size());
  for (std::size_t i = 0; i < p.scenario.robots.size(); ++i) {
    Roadmap rm = load_roadmap(roadmap_path(dir, i));
    annotated.push_back(load_volumes(std::move(rm), volumes_path(dir, i)));
  }
  p.graph = assemble_graph(p.scenario, std::move(annotated));
  return p;
}

void print_vertex(const CompositeVertex& v) {
  std::cout << '(';
  for (std::size_t i = 0; i < v.node_ids.size(); ++i) {
    if (i) std::cout << ',';
    std::cout << v.node_ids[i];
  }
  std::cout << ')';
}

int cmd_gen_roadmap(const std::string& scenario_path, const std::string& out_dir,
                    std::uint64_t seed_override, bool has_seed) {
  const Scenario scenario = load_scenario(scenario_path);
  const std::uint64_t seed = has_seed ? seed_override : scenario.planner_defaults.seed;
  std::filesystem::create_directories(out_dir);
  const std::vector<Roadmap> roadmaps = build_scenario_roadmaps(scenario, seed);
  save_scenario(scenario, out_dir + "/scenario.json");
  for (std::size_t i = 0; i < roadmaps.size(); ++i) {
    save_roadmap(roadmaps[i], roadmap_path(out_dir, i));
    std::cout << "robot " << i << ": " << roadmaps[i].nodes.size() << " nodes, "
              << roadmaps[i].edges.size() << " edges\n";
  }
  std::cout << "roadmaps written to " << out_dir << " (seed " << seed << ")\n";
  return 0;
}

int cmd_voxelize(const std::string& dir, double d_voxel_override,
                 double delta_override) {
  Scenario scenario = load_scenario(dir + "/scenario.json");
  if (d_voxel_override > 0.0) scenario.grid.d_voxel = d_voxel_override;
  const VoxelGrid grid = scenario_grid(scenario);
  std::size_t total_voxels = 0;
  for (std::size_t i = 0; i < scenario.robots.size(); ++i) {
    Roadmap rm = load_roadmap(roadmap_path(dir, i));
    const AnnotatedRoadmap ann = annotate_roadmap(
        scenario.robots[i].model, std::move(rm), grid, delta_override);
    for (const VoxelSet& vs : ann.node_volumes) total_voxels += vs.size();
    for (const VoxelSet& vs : ann.edge_volumes) total_voxels += vs.size();
    save_volumes(ann, volumes_path(dir, i));
  }
  if (d_voxel_override > 0.0) save_scenario(scenario, dir + "/scenario.json");
  std::cout << "grid " << grid.nx << "x" << grid.ny << " @ " << grid.d_voxel
            << " m, " << total_voxels << " voxel entries written\n";
  return 0;
}

int cmd_plan(const std::string& dir, std::size_t segment, const std::string& mode,
             std::uint64_t seed, bool has_seed, std::uint64_t max_iters,
             double time_limit, bool stop_first, const std::string& converge) {
  const LoadedPipeline p = load_pipeline(dir);
  const ProblemSpec problem = make_problem(p.graph, p.scenario, segment);

  PlannerConfig cfg = p.scenario.planner_defaults;
  cfg.mode = mode == "drrt" ? PlannerMode::DRRTStar : PlannerMode::FastDRRTStar;
  if (has_seed) cfg.seed = seed;
  if (max_iters > 0) cfg.max_iterations = max_iters;
  if (time_limit > 0.0) cfg.time_limit_s = time_limit;
  cfg.stop_at_first_solution = stop_first;
  if (!converge.empty()) {
    CostConvergence cc;
    if (std::sscanf(converge.c_str(), "%lu,%lf", &cc.window, &cc.epsilon) != 2) {
      throw ConfigError("plan: --converge expects WINDOW,EPSILON");
    }
    cfg.cost_convergence = cc;
  }

  const PlanResult result = plan_with_mode(p.graph, problem, cfg);
  std::cout << "mode: " << mode << "  seed: " << cfg.seed << '\n';
  std::cout << "iterations: " << result.stats.iterations << '\n';
  if (!result.stats.solved) {
    std::cout << "no solution\n";
    return 1;
  }
  std::cout << "time to first solution: "
            << static_cast<double>(result.stats.time_to_first_ns) / 1e6 << " ms\n";
  std::cout << "first cost: " << result.stats.cost_first << '\n';
  std::cout << "best cost: " << result.best_cost << '\n';
  std::cout << "cost timeline (elapsed_ns, best_cost):\n";
  for (const CostSample& s : result.stats.timeline) {
    std::cout << "  " << s.elapsed_ns << ' ' << s.cost << '\n';
  }
  std::cout << "path (" << result.best_path.size() << " vertices):";
  for (const CompositeVertex& v : result.best_path) {
    std::cout << ' ';
    print_vertex(v);
  }
  std::cout << '\n';
  return 0;
}

int cmd_bench(const std::string& dir, const std::string& out_dir, int segment,
              std::uint32_t runs, double budget_ms, double perturb_sigma,
              const std::string& modes, std::uint64_t master_seed) {
  const LoadedPipeline p = load_pipeline(dir);
  BenchOptions options;
  options.n_runs = runs;
  options.budget_s = budget_ms / 1000.0;
  options.master_seed = master_seed;
  if (perturb_sigma > 0.0) options.perturb_sigma = perturb_sigma;
  options.modes.clear();
  if (modes.find("fast") != std::string::npos) {
    options.modes.push_back(PlannerMode::FastDRRTStar);
  }
  if (modes.find("drrt") != std::string::npos) {
    options.modes.push_back(PlannerMode::DRRTStar);
  }
  if (options.modes.empty()) {
    throw ConfigError("bench: --modes must mention fast and/or drrt");
  }

  std::vector<RunRecord> records;
  std::vector<std::size_t> segments;
  if (segment >= 0) {
    segments.push_back(static_cast<std::size_t>(segment));
  } else {
    for (std::size_t s = 0; s < p.scenario.segment_count(); ++s) {
      segments.push_back(s);
    }
  }
  for (std::size_t s : segments) {
    std::vector<RunRecord> seg_records =
        run_segment_experiment(p.scenario, &p.graph, s, options);
    records.insert(records.end(), seg_records.begin(), seg_records.end());
  }

  const std::string out = out_dir.empty() ? dir : out_dir;
  std::filesystem::create_directories(out);
  emit_results(records, out);

  for (const SummaryRow& row : summarize(records)) {
    std::cout << row.scenario_id << " seg " << row.segment << ' ' << row.mode
              << ": solved " << row.solved << '/' << row.runs << ", mean time 1st "
              << row.mean_time_first_ms << " ms, worst " << row.worst_time_first_ms
              << " ms, mean cost 1st " << row.mean_cost_first
              << ", mean cost @budget " << row.mean_cost_at_budget << '\n';
  }
  std::cout << "results written to " << out << '\n';
  bool all_solved = true;
  for (const RunRecord& r : records) all_solved = all_solved && r.solved;
  return all_solved ? 0 : 1;
}

int cmd_oracle(const std::string& dir, std::size_t segment, std::uint64_t cap) {
  const LoadedPipeline p = load_pipeline(dir);
  const ProblemSpec problem = make_problem(p.graph, p.scenario, segment);
  const ExplicitProductGraph explicit_graph = build_explicit(p.graph, cap);
  const OracleResult res = optimal_cost(
      explicit_graph, problem.start,
      [&](const CompositeVertex& v) { return goal_satisfied(problem, v); });
  if (!std::isfinite(res.cost)) {
    std::cout << "no path exists\n";
    return 1;
  }
  std::cout << "optimal cost: " << res.cost << '\n';
  std::cout << "path (" << res.path.size() << " vertices):";
  for (const CompositeVertex& v : res.path) {
    std::cout << ' ';
    print_vertex(v);
  }
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast-dRRT* multi-robot motion planning toolkit"};
  app.require_subcommand(1);

  std::string scenario_path, dir, out_dir, mode = "fast", converge, modes = "fast,drrt";
  std::uint64_t seed = 0, max_iters = 0, master_seed = 1, cap = kDefaultExplicitCap;
  std::size_t segment = 0;
  int bench_segment = -1;
  double d_voxel = 0.0, delta = 0.0, time_limit = 0.0, budget_ms = 100.0,
         perturb_sigma = 0.0;
  std::uint32_t runs = 100;
  bool stop_first = false;

  auto* gen = app.add_subcommand("gen-roadmap", "Build per-robot roadmaps");
  gen->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  gen->add_option("-o,--out", out_dir, "Output artifact directory")->required();
  auto* gen_seed = gen->add_option("--seed", seed, "Roadmap master seed");

  auto* vox = app.add_subcommand("voxelize", "Precompute swept volumes");
  vox->add_option("dir", dir, "Artifact directory")->required();
  vox->add_option("--d-voxel", d_voxel, "Voxel edge length (m)");
  vox->add_option("--delta", delta, "Edge sample spacing (rad); default auto");

  auto* plan_cmd = app.add_subcommand("plan", "Plan one segment");
  plan_cmd->add_option("dir", dir, "Artifact directory")->required();
  plan_cmd->add_option("--segment", segment, "Segment index")->required();
  plan_cmd->add_option("--mode", mode, "fast|drrt")
      ->check(CLI::IsMember({"fast", "drrt"}));
  auto* plan_seed = plan_cmd->add_option("--seed", seed, "Planner seed");
  plan_cmd->add_option("--max-iters", max_iters, "Iteration cap");
  plan_cmd->add_option("--time-limit", time_limit, "Time limit (s)");
  plan_cmd->add_flag("--first", stop_first, "Stop at first solution");
  plan_cmd->add_option("--converge", converge, "Cost convergence WINDOW,EPSILON");

  auto* bench_cmd = app.add_subcommand("bench", "Run the benchmark protocol");
  bench_cmd->add_option("dir", dir, "Artifact directory")->required();
  bench_cmd->add_option("--runs", runs, "Runs per (mode, segment)");
  bench_cmd->add_option("--budget-ms", budget_ms, "Cost measurement budget (ms)");
  bench_cmd->add_option("--perturb-sigma", perturb_sigma,
                        "Target perturbation stddev (rad)");
  bench_cmd->add_option("--segment", bench_segment, "Single segment (default all)");
  bench_cmd->add_option("--modes", modes, "Comma list of fast,drrt");
  bench_cmd->add_option("--master-seed", master_seed, "Master seed");
  bench_cmd->add_option("-o,--out", out_dir, "Results directory (default dir)");

  auto* oracle_cmd = app.add_subcommand("oracle", "Explicit-graph optimal cost");
  oracle_cmd->add_option("dir", dir, "Artifact directory")->required();
  oracle_cmd->add_option("--segment", segment, "Segment index")->required();
  oracle_cmd->add_option("--cap", cap, "Product-graph vertex cap");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen_roadmap(scenario_path, out_dir, seed, !gen_seed->empty());
    }
    if (vox->parsed()) {
      return cmd_voxelize(dir, d_voxel, delta);
    }
    if (plan_cmd->parsed()) {
      return cmd_plan(dir, segment, mode, seed, !plan_seed->empty(), max_iters,
                      time_limit, stop_first, converge);
    }
    if (bench_cmd->parsed()) {
      return cmd_bench(dir, out_dir, bench_segment, runs, budget_ms, perturb_sigma,
                       modes, master_seed);
    }
    if (oracle_cmd->parsed()) {
      return cmd_oracle(dir, segment, cap);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const PlanningFailure& e) {
    std::cerr << "planning failed: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
