#include "fdrrt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <thread>

#include "fdrrt/errors.hpp"
#include "fdrrt/oracle.hpp"

namespace fdrrt {

const char* mode_name(PlannerMode mode) {
  return mode == PlannerMode::DRRTStar ? "drrt" : "fast";
}

Scenario perturb_targets(const Scenario& scenario, double sigma,
                         RandomEngine& rng) {
  if (sigma < 0.0) {
    throw std::invalid_argument("perturb_targets: sigma must be >= 0");
  }
  Scenario out = scenario;
  for (std::size_t i = 0; i < out.robots.size(); ++i) {
    RobotSpec& r = out.robots[i];
    for (std::size_t t = 0; t < r.targets.size(); ++t) {
      const Configuration& original = scenario.robots[i].targets[t];
      bool placed = false;
      for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
        Configuration q(original.size());
        for (std::size_t j = 0; j < q.size(); ++j) {
          q[j] = std::clamp(original[j] + rng.normal(0.0, sigma),
                            r.model.joint_limits[j].lower,
                            r.model.joint_limits[j].upper);
        }
        if (!config_collides(r.model, q, out.obstacles)) {
          r.targets[t] = std::move(q);
          placed = true;
        }
      }
      if (!placed) {
        throw PlanningFailure("perturb_targets: no collision-free perturbation of robot " +
                              std::to_string(i) + " target " + std::to_string(t) +
                              " in 100 tries");
      }
    }
  }
  return out;
}

std::uint32_t resolve_workers(std::uint32_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FDRRT_WORKERS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<std::uint32_t>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

namespace {

PlannerConfig run_config(const Scenario& scenario, PlannerMode mode,
                         std::uint64_t seed, const BenchOptions& options) {
  PlannerConfig cfg = scenario.planner_defaults;
  cfg.mode = mode;
  cfg.seed = seed;
  cfg.solution_hold_s = options.budget_s;
  cfg.synthetic_ns_per_iteration = options.synthetic_ns_per_iteration;
  if (!cfg.max_iterations && !cfg.time_limit_s) {
    cfg.max_iterations = 100000;
  }
  return cfg;
}

// Spot revalidation of a reported path: every composite edge must pass the
// voxel check and the dense exact sweep check.
void revalidate_record_path(const Scenario& scenario, const ImplicitGraph& graph,
                            const std::vector<CompositeVertex>& path) {
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (!is_edge_valid(graph, path[k - 1], path[k])) {
      throw std::logic_error("bench: reported path fails the voxel check");
    }
    for (std::size_t i = 0; i < graph.size(); ++i) {
      for (std::size_t j = i + 1; j < graph.size(); ++j) {
        const Motion mi{graph.roadmap(i).nodes[path[k - 1].node_ids[i]],
                        graph.roadmap(i).nodes[path[k].node_ids[i]]};
        const Motion mj{graph.roadmap(j).nodes[path[k - 1].node_ids[j]],
                        graph.roadmap(j).nodes[path[k].node_ids[j]]};
        const double grid_d = graph.robots[i].annotated.grid.d_voxel;
        const double delta =
            std::min(default_edge_delta(scenario.robots[i].model, mi.from,
                                        mi.to, grid_d),
                     default_edge_delta(scenario.robots[j].model, mj.from,
                                        mj.to, grid_d));
        if (exact_swept_overlap(scenario.robots[i].model, mi,
                                scenario.robots[j].model, mj, delta / 2.0)) {
          throw std::logic_error("bench: reported path fails the exact check");
        }
      }
    }
  }
}

RunRecord make_record(const Scenario& scenario, std::size_t segment,
                      PlannerMode mode, std::uint64_t seed,
                      const PlanResult& result, double budget_s) {
  RunRecord rec;
  rec.scenario_id = scenario.id;
  rec.segment = static_cast<std::uint32_t>(segment);
  rec.mode = mode_name(mode);
  rec.seed = seed;
  rec.solved = result.stats.solved;
  if (rec.solved) {
    rec.time_to_first_ns = result.stats.time_to_first_ns;
    rec.cost_first = result.stats.cost_first;
    rec.cost_at_budget =
        result.stats.cost_at(static_cast<std::uint64_t>(budget_s * 1e9));
  }
  return rec;
}

}  // namespace

std::vector<RunRecord> run_segment_experiment(const Scenario& scenario,
                                              const ImplicitGraph* precomputed,
                                              std::size_t segment,
                                              const BenchOptions& options) {
  if (options.n_runs < 1) {
    throw std::invalid_argument("run_segment_experiment: n_runs must be >= 1");
  }
  if (!options.perturb_sigma && precomputed == nullptr) {
    throw ConfigError(
        "run_segment_experiment: precomputed roadmaps and volumes required; "
        "run gen-roadmap and voxelize first");
  }

  const std::size_t n_modes = options.modes.size();
  std::vector<RunRecord> records(n_modes * options.n_runs);

  // One work item per derived seed; both modes run inside the item so
  // paired-seed comparisons see the same memory/cache conditions.
  std::atomic<std::uint32_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::uint32_t k = next.fetch_add(1);
      if (k >= options.n_runs) return;
      const std::uint64_t seed = mix_seed(options.master_seed, k + 1);

      const Scenario* run_scenario = &scenario;
      const ImplicitGraph* run_graph = precomputed;
      Scenario perturbed;
      ImplicitGraph rebuilt;
      if (options.perturb_sigma) {
        RandomEngine perturb_rng(mix_seed(seed, 0x50455254u));  // "PERT"
        perturbed = perturb_targets(scenario, *options.perturb_sigma, perturb_rng);
        const VoxelGrid grid = scenario_grid(perturbed);
        std::vector<Roadmap> roadmaps =
            build_scenario_roadmaps(perturbed, mix_seed(seed, 0x524d4150u));
        std::vector<AnnotatedRoadmap> annotated;
        annotated.reserve(roadmaps.size());
        for (std::size_t i = 0; i < roadmaps.size(); ++i) {
          annotated.push_back(annotate_roadmap(perturbed.robots[i].model,
                                               std::move(roadmaps[i]), grid));
        }
        rebuilt = assemble_graph(perturbed, std::move(annotated));
        run_scenario = &perturbed;
        run_graph = &rebuilt;
      }

      const ProblemSpec problem = make_problem(*run_graph, *run_scenario, segment);
      for (std::size_t m = 0; m < n_modes; ++m) {
        const PlannerConfig cfg =
            run_config(*run_scenario, options.modes[m], seed, options);
        const PlanResult result = plan_with_mode(*run_graph, problem, cfg);
        // One in ten solved runs gets its path re-checked post hoc.
        if (result.stats.solved && k % 10 == 0) {
          revalidate_record_path(*run_scenario, *run_graph, result.best_path);
        }
        records[m * options.n_runs + k] = make_record(
            *run_scenario, segment, options.modes[m], seed, result, options.budget_s);
      }
    }
  };

  const std::uint32_t n_workers =
      std::min<std::uint32_t>(resolve_workers(options.workers), options.n_runs);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::uint32_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return records;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct GroupKey {
  std::string scenario_id;
  std::uint32_t segment;
  std::string mode;
  bool operator<(const GroupKey& o) const {
    if (scenario_id != o.scenario_id) return scenario_id < o.scenario_id;
    if (segment != o.segment) return segment < o.segment;
    return mode < o.mode;
  }
};

std::vector<RunRecord> sorted_records(std::vector<RunRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) {
              if (a.scenario_id != b.scenario_id) return a.scenario_id < b.scenario_id;
              if (a.segment != b.segment) return a.segment < b.segment;
              if (a.mode != b.mode) return a.mode < b.mode;
              return a.seed < b.seed;
            });
  return records;
}

constexpr int kHistogramBins = 20;

void write_histogram(std::ofstream& out, const GroupKey& key,
                     const std::vector<double>& values) {
  double max_value = 0.0;
  for (double v : values) max_value = std::max(max_value, v);
  const double width = max_value > 0.0 ? max_value / kHistogramBins : 1.0;
  std::vector<std::uint32_t> counts(kHistogramBins, 0);
  for (double v : values) {
    int bin = static_cast<int>(v / width);
    bin = std::clamp(bin, 0, kHistogramBins - 1);
    ++counts[static_cast<std::size_t>(bin)];
  }
  for (int b = 0; b < kHistogramBins; ++b) {
    out << key.scenario_id << ',' << key.segment << ',' << key.mode << ',' << b
        << ',' << fmt(b * width) << ',' << fmt((b + 1) * width) << ','
        << counts[static_cast<std::size_t>(b)] << '\n';
  }
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  std::map<GroupKey, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : records) {
    groups[GroupKey{r.scenario_id, r.segment, r.mode}].push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, group] : groups) {
    SummaryRow row;
    row.scenario_id = key.scenario_id;
    row.segment = key.segment;
    row.mode = key.mode;
    row.runs = static_cast<std::uint32_t>(group.size());
    double time_sum = 0.0, cost_sum = 0.0, budget_sum = 0.0;
    for (const RunRecord* r : group) {
      if (!r->solved) continue;
      ++row.solved;
      const double ms = static_cast<double>(r->time_to_first_ns) / 1e6;
      time_sum += ms;
      row.worst_time_first_ms = std::max(row.worst_time_first_ms, ms);
      cost_sum += r->cost_first;
      if (r->cost_at_budget) {
        ++row.solved_by_budget;
        budget_sum += *r->cost_at_budget;
      }
    }
    if (row.solved > 0) {
      row.mean_time_first_ms = time_sum / row.solved;
      row.mean_cost_first = cost_sum / row.solved;
    }
    if (row.solved_by_budget > 0) {
      row.mean_cost_at_budget = budget_sum / row.solved_by_budget;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_results(const std::vector<RunRecord>& records, const std::string& dir) {
  if (records.empty()) {
    throw std::invalid_argument("emit_results: no records");
  }
  const std::vector<RunRecord> sorted = sorted_records(records);

  std::ofstream runs(dir + "/runs.csv");
  if (!runs) {
    throw ConfigError("emit_results: cannot write " + dir + "/runs.csv");
  }
  runs << "scenario,segment,mode,seed,solved,time_to_first_ns,cost_first,cost_at_budget\n";
  for (const RunRecord& r : sorted) {
    runs << r.scenario_id << ',' << r.segment << ',' << r.mode << ',' << r.seed
         << ',' << (r.solved ? 1 : 0) << ',';
    if (r.solved) runs << r.time_to_first_ns;
    runs << ',';
    if (r.solved) runs << fmt(r.cost_first);
    runs << ',';
    if (r.cost_at_budget) runs << fmt(*r.cost_at_budget);
    runs << '\n';
  }

  std::ofstream summary(dir + "/summary.csv");
  summary << "scenario,segment,mode,runs,solved,mean_time_first_ms,"
             "worst_time_first_ms,mean_cost_first,solved_by_budget,"
             "mean_cost_at_budget\n";
  for (const SummaryRow& row : summarize(sorted)) {
    summary << row.scenario_id << ',' << row.segment << ',' << row.mode << ','
            << row.runs << ',' << row.solved << ',' << fmt(row.mean_time_first_ms)
            << ',' << fmt(row.worst_time_first_ms) << ',' << fmt(row.mean_cost_first)
            << ',' << row.solved_by_budget << ',' << fmt(row.mean_cost_at_budget)
            << '\n';
  }

  std::map<GroupKey, std::vector<double>> times, costs;
  for (const RunRecord& r : sorted) {
    if (!r.solved) continue;
    const GroupKey key{r.scenario_id, r.segment, r.mode};
    times[key].push_back(static_cast<double>(r.time_to_first_ns) / 1e6);
    costs[key].push_back(r.cost_first);
  }
  std::ofstream hist_time(dir + "/hist_time.csv");
  hist_time << "scenario,segment,mode,bin,lo_ms,hi_ms,count\n";
  for (const auto& [key, values] : times) write_histogram(hist_time, key, values);
  std::ofstream hist_cost(dir + "/hist_cost.csv");
  hist_cost << "scenario,segment,mode,bin,lo,hi,count\n";
  for (const auto& [key, values] : costs) write_histogram(hist_cost, key, values);
}

}  // namespace fdrrt
