#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "fdrrt/composite.hpp"

namespace fdrrt {

/// Per-robot goal: either an explicit set of roadmap nodes or the any-goal
/// (whole state space, always satisfied).
struct GoalSpec {
  bool any_goal = false;
  std::vector<NodeId> nodes;  // sorted; empty iff any_goal

  static GoalSpec any() { return GoalSpec{true, {}}; }
  static GoalSpec at(std::vector<NodeId> nodes);
};

struct ProblemSpec {
  CompositeVertex start;
  std::vector<GoalSpec> goals;  // one per robot

  /// Throws std::invalid_argument unless the start is valid, every explicit
  /// goal set is non-empty and in range, and at least one robot has an
  /// explicit goal.
  void validate(const ImplicitGraph& graph) const;
};

bool goal_satisfied(const ProblemSpec& problem, const CompositeVertex& v);

enum class PlannerMode { FastDRRTStar, DRRTStar };
enum class ExpansionRule { RandomNeighbor, DirectionOracle };

struct CostConvergence {
  std::uint64_t window = 0;  // iterations without improvement
  double epsilon = 0.0;      // improvements <= epsilon don't count
};

struct PlannerConfig {
  // Terminate condition: stop when any present term fires. At least one of
  // the first four must be set.
  std::optional<std::uint64_t> max_iterations;
  std::optional<double> time_limit_s;
  bool stop_at_first_solution = false;
  std::optional<CostConvergence> cost_convergence;
  // Extra term used by the benchmark protocol: stop once a solution exists
  // and at least this much time has elapsed (run to first solution, keep
  // improving until the measurement budget is spent).
  std::optional<double> solution_hold_s;

  PlannerMode mode = PlannerMode::FastDRRTStar;
  ExpansionRule expansion_rule = ExpansionRule::RandomNeighbor;
  std::uint64_t seed = 1;

  bool drrt_rewire_cycle = true;   // only read in DRRTStar mode
  bool freeze_any_goal = false;    // diagnostic: disables deadlock avoidance
  bool check_invariants = false;   // re-derive tree costs after every iteration
  // >0: elapsed time is iterations * this value instead of the wall clock,
  // which makes timing fields reproducible bit-for-bit.
  std::uint64_t synthetic_ns_per_iteration = 0;

  void validate() const;
};

struct CostSample {
  std::uint64_t iteration = 0;
  std::uint64_t elapsed_ns = 0;
  double cost = 0.0;
};

constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

struct PlanStats {
  std::uint64_t iterations = 0;
  bool solved = false;
  std::uint64_t time_to_first_ns = 0;
  double cost_first = kInfiniteCost;
  std::vector<CostSample> timeline;  // one sample per best-cost improvement

  /// Best cost at or before the given elapsed time; nullopt if no solution
  /// existed by then.
  std::optional<double> cost_at(std::uint64_t elapsed_ns) const;
};

struct PlanResult {
  std::vector<CompositeVertex> best_path;
  double best_cost = kInfiniteCost;
  PlanStats stats;
};

/// Search tree over composite vertices: parent links, cost-to-come, children
/// lists for rewiring propagation, and the set of goal-satisfying vertices.
class SearchTree {
 public:
  struct Node {
    CompositeVertex vertex;
    std::vector<double> flat;  // concatenated configuration
    std::int32_t parent = -1;
    double cost = 0.0;
    std::vector<std::int32_t> children;
  };

  SearchTree(const ImplicitGraph& graph, const CompositeVertex& root);

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::int32_t i) const { return nodes_[static_cast<std::size_t>(i)]; }
  double cost(std::int32_t i) const { return nodes_[static_cast<std::size_t>(i)].cost; }

  std::optional<std::int32_t> find(const CompositeVertex& v) const;
  std::int32_t insert(const CompositeVertex& v, std::int32_t parent, double cost);

  /// Tree vertex minimizing distance to the flattened query; ties broken by
  /// insertion order.
  std::int32_t nearest(const std::vector<double>& flat_query) const;

  bool is_ancestor(std::int32_t maybe_ancestor, std::int32_t v) const;

  /// Re-parents v under new_parent with the given cost and shifts every
  /// descendant by the cost delta. Caller must have excluded cycles.
  void rewire(std::int32_t v, std::int32_t new_parent, double new_cost);

  void mark_goal_hit(std::int32_t v) { goal_hits_.push_back(v); }
  const std::vector<std::int32_t>& goal_hits() const { return goal_hits_; }

  std::vector<CompositeVertex> path_from_root(std::int32_t v) const;

  /// Debug: recomputes every cost from parent links via edge_cost and throws
  /// std::logic_error if any deviates more than tol or the structure cycles.
  void check_consistency(const ImplicitGraph& graph, double tol) const;

 private:
  const ImplicitGraph* graph_;
  std::vector<Node> nodes_;
  std::unordered_map<CompositeVertex, std::int32_t, CompositeVertex::Hash> index_;
  std::vector<std::int32_t> goal_hits_;
};

/// Per-robot next-hop policies for the robots with explicit goals.
struct GoalPolicies {
  std::vector<std::optional<NextHopPolicy>> per_robot;
};

GoalPolicies make_goal_policies(const ImplicitGraph& graph,
                                const ProblemSpec& problem);

/// One expansion step: with no last vertex every component moves to a random
/// (or direction-oracle) neighbor; otherwise any-goal components hold and
/// goal-directed components advance one hop along their shortest path.
/// Returns nullopt when a goal-directed component sits outside its policy's
/// connected component.
std::optional<CompositeVertex> informed_any_goal_expansion(
    const ImplicitGraph& graph, const ProblemSpec& problem,
    const GoalPolicies& policies, const CompositeVertex* v_last,
    const CompositeVertex& v_near, const CompositeState* x_rand,
    const PlannerConfig& config, RandomEngine& rng);

/// Replaces (best_path, best_cost) with the cheapest goal-satisfying tree
/// path when strictly cheaper. Returns true on improvement.
bool update_best(const SearchTree& tree, std::vector<CompositeVertex>& best_path,
                 double& best_cost);

/// Fast-dRRT*: no rewiring cycle.
PlanResult plan(const ImplicitGraph& graph, const ProblemSpec& problem,
                const PlannerConfig& config);

/// dRRT* baseline: best-parent selection and neighbor rewiring through each
/// new vertex, restricted to tree-resident implicit-graph neighbors.
PlanResult plan_drrt_star(const ImplicitGraph& graph, const ProblemSpec& problem,
                          const PlannerConfig& config);

/// Dispatches on config.mode.
PlanResult plan_with_mode(const ImplicitGraph& graph, const ProblemSpec& problem,
                          const PlannerConfig& config);

}  // namespace fdrrt
