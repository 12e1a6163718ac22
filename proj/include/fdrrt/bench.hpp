#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fdrrt/scenario.hpp"

namespace fdrrt {

struct RunRecord {
  std::string scenario_id;
  std::uint32_t segment = 0;
  std::string mode;  // "fast" | "drrt"
  std::uint64_t seed = 0;
  bool solved = false;
  // Valid only when solved:
  std::uint64_t time_to_first_ns = 0;
  double cost_first = 0.0;
  // Best cost at the measurement budget; absent when no solution existed yet.
  std::optional<double> cost_at_budget;
};

struct BenchOptions {
  std::vector<PlannerMode> modes{PlannerMode::FastDRRTStar, PlannerMode::DRRTStar};
  std::uint32_t n_runs = 100;
  double budget_s = 0.1;
  std::uint64_t master_seed = 1;
  std::optional<double> perturb_sigma;  // per-run target noise (rad)
  std::uint32_t workers = 0;            // 0: FDRRT_WORKERS env, then hardware
  std::uint64_t synthetic_ns_per_iteration = 0;
};

const char* mode_name(PlannerMode mode);

/// Per-robot target perturbation: independent zero-mean Gaussian noise on
/// every target angle, clamped to joint limits and re-validated against the
/// environment (up to 100 resamples per target).
Scenario perturb_targets(const Scenario& scenario, double sigma,
                         RandomEngine& rng);

/// Runs n_runs seeded (mode x seed) plans of one segment and collects the
/// first-solution and budget metrics. `precomputed` is required unless
/// perturb_sigma is set, in which case every run rebuilds its own roadmaps
/// from the perturbed targets. Runs execute on a worker pool; record order is
/// (mode, seed), independent of scheduling.
std::vector<RunRecord> run_segment_experiment(const Scenario& scenario,
                                              const ImplicitGraph* precomputed,
                                              std::size_t segment,
                                              const BenchOptions& options);

struct SummaryRow {
  std::string scenario_id;
  std::uint32_t segment = 0;
  std::string mode;
  std::uint32_t runs = 0;
  std::uint32_t solved = 0;
  double mean_time_first_ms = 0.0;
  double worst_time_first_ms = 0.0;
  double mean_cost_first = 0.0;
  // Over the runs that had a solution by the budget:
  std::uint32_t solved_by_budget = 0;
  double mean_cost_at_budget = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

/// Writes runs.csv, summary.csv, hist_time.csv and hist_cost.csv into dir.
/// Byte-deterministic for identical records.
void emit_results(const std::vector<RunRecord>& records, const std::string& dir);

std::uint32_t resolve_workers(std::uint32_t requested);

}  // namespace fdrrt
