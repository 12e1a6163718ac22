#include "fdrrt/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <stdexcept>

namespace fdrrt {

GoalSpec GoalSpec::at(std::vector<NodeId> nodes) {
  GoalSpec g;
  g.any_goal = false;
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  g.nodes = std::move(nodes);
  return g;
}

void ProblemSpec::validate(const ImplicitGraph& graph) const {
  if (start.node_ids.size() != graph.size() || goals.size() != graph.size()) {
    throw std::invalid_argument("ProblemSpec: start/goals size must match robot count");
  }
  bool any_explicit = false;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const std::size_t n = graph.roadmap(i).nodes.size();
    if (start.node_ids[i] >= n) {
      throw std::invalid_argument("ProblemSpec: start node out of range");
    }
    if (goals[i].any_goal) continue;
    any_explicit = true;
    if (goals[i].nodes.empty()) {
      throw std::invalid_argument("ProblemSpec: explicit goal set must be non-empty");
    }
    for (NodeId g : goals[i].nodes) {
      if (g >= n) {
        throw std::invalid_argument("ProblemSpec: goal node out of range");
      }
    }
  }
  if (!any_explicit) {
    throw std::invalid_argument("ProblemSpec: at least one robot needs an explicit goal");
  }
}

bool goal_satisfied(const ProblemSpec& problem, const CompositeVertex& v) {
  for (std::size_t i = 0; i < problem.goals.size(); ++i) {
    const GoalSpec& g = problem.goals[i];
    if (g.any_goal) continue;
    if (!std::binary_search(g.nodes.begin(), g.nodes.end(), v.node_ids[i])) {
      return false;
    }
  }
  return true;
}

void PlannerConfig::validate() const {
  if (!max_iterations && !time_limit_s && !stop_at_first_solution &&
      !cost_convergence) {
    throw std::invalid_argument("PlannerConfig: at least one terminate condition required");
  }
  if (cost_convergence && cost_convergence->window == 0) {
    throw std::invalid_argument("PlannerConfig: convergence window must be > 0");
  }
}

std::optional<double> PlanStats::cost_at(std::uint64_t elapsed_ns) const {
  std::optional<double> best;
  for (const CostSample& s : timeline) {
    if (s.elapsed_ns <= elapsed_ns) best = s.cost;
  }
  return best;
}

SearchTree::SearchTree(const ImplicitGraph& graph, const CompositeVertex& root)
    : graph_(&graph) {
  Node n;
  n.vertex = root;
  n.flat = flat_state_of(graph, root);
  n.parent = -1;
  n.cost = 0.0;
  nodes_.push_back(std::move(n));
  index_.emplace(root, 0);
}

std::optional<std::int32_t> SearchTree::find(const CompositeVertex& v) const {
  const auto it = index_.find(v);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::int32_t SearchTree::insert(const CompositeVertex& v, std::int32_t parent,
                                double cost) {
  Node n;
  n.vertex = v;
  n.flat = flat_state_of(*graph_, v);
  n.parent = parent;
  n.cost = cost;
  const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(std::move(n));
  nodes_[static_cast<std::size_t>(parent)].children.push_back(id);
  index_.emplace(v, id);
  return id;
}

std::int32_t SearchTree::nearest(const std::vector<double>& flat_query) const {
  std::int32_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const std::vector<double>& f = nodes_[i].flat;
    double d2 = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double d = f[k] - flat_query[k];
      d2 += d * d;
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<std::int32_t>(i);
    }
  }
  return best;
}

bool SearchTree::is_ancestor(std::int32_t maybe_ancestor, std::int32_t v) const {
  for (std::int32_t cur = v; cur >= 0;
       cur = nodes_[static_cast<std::size_t>(cur)].parent) {
    if (cur == maybe_ancestor) return true;
  }
  return false;
}

void SearchTree::rewire(std::int32_t v, std::int32_t new_parent, double new_cost) {
  Node& node = nodes_[static_cast<std::size_t>(v)];
  const double delta = new_cost - node.cost;
  // Detach from the old parent.
  if (node.parent >= 0) {
    auto& siblings = nodes_[static_cast<std::size_t>(node.parent)].children;
    siblings.erase(std::find(siblings.begin(), siblings.end(), v));
  }
  node.parent = new_parent;
  nodes_[static_cast<std::size_t>(new_parent)].children.push_back(v);
  // Shift v and all descendants by the same delta.
  std::vector<std::int32_t> stack{v};
  while (!stack.empty()) {
    const std::int32_t cur = stack.back();
    stack.pop_back();
    nodes_[static_cast<std::size_t>(cur)].cost += delta;
    for (std::int32_t c : nodes_[static_cast<std::size_t>(cur)].children) {
      stack.push_back(c);
    }
  }
}

std::vector<CompositeVertex> SearchTree::path_from_root(std::int32_t v) const {
  std::vector<CompositeVertex> path;
  for (std::int32_t cur = v; cur >= 0;
       cur = nodes_[static_cast<std::size_t>(cur)].parent) {
    path.push_back(nodes_[static_cast<std::size_t>(cur)].vertex);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

void SearchTree::check_consistency(const ImplicitGraph& graph, double tol) const {
  if (nodes_.empty() || nodes_[0].parent != -1 || nodes_[0].cost != 0.0) {
    throw std::logic_error("SearchTree: bad root");
  }
  std::vector<char> visited(nodes_.size(), 0);
  std::vector<std::int32_t> stack{0};
  std::size_t seen = 0;
  while (!stack.empty()) {
    const std::int32_t cur = stack.back();
    stack.pop_back();
    if (visited[static_cast<std::size_t>(cur)]) {
      throw std::logic_error("SearchTree: cycle in parent structure");
    }
    visited[static_cast<std::size_t>(cur)] = 1;
    ++seen;
    const Node& n = nodes_[static_cast<std::size_t>(cur)];
    if (n.parent >= 0) {
      const Node& p = nodes_[static_cast<std::size_t>(n.parent)];
      const double expect = p.cost + edge_cost(graph, p.vertex, n.vertex);
      if (std::abs(expect - n.cost) > tol) {
        throw std::logic_error("SearchTree: cost-to-come inconsistent with parent");
      }
    }
    for (std::int32_t c : n.children) stack.push_back(c);
  }
  if (seen != nodes_.size()) {
    throw std::logic_error("SearchTree: detached vertices");
  }
}

GoalPolicies make_goal_policies(const ImplicitGraph& graph,
                                const ProblemSpec& problem) {
  GoalPolicies policies;
  policies.per_robot.resize(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (!problem.goals[i].any_goal) {
      policies.per_robot[i] = next_hop_policy(graph.roadmap(i), problem.goals[i].nodes);
    }
  }
  return policies;
}

namespace {

// Neighbor minimizing the angle between (neighbor - node) and
// (toward - node) in configuration space; node itself when isolated or when
// the target direction degenerates.
NodeId directed_neighbor(const Roadmap& roadmap, NodeId node,
                         const Configuration& toward) {
  const auto& incident = roadmap.adjacency[node];
  if (incident.empty()) return node;
  const Configuration& here = roadmap.nodes[node];
  double dir_norm2 = 0.0;
  for (std::size_t j = 0; j < here.size(); ++j) {
    const double d = toward[j] - here[j];
    dir_norm2 += d * d;
  }
  if (dir_norm2 <= 0.0) return node;
  NodeId best = node;
  double best_cos = -2.0;
  for (EdgeId e : incident) {
    const NodeId m = roadmap.other_end(e, node);
    const Configuration& there = roadmap.nodes[m];
    double dot = 0.0, n2 = 0.0;
    for (std::size_t j = 0; j < here.size(); ++j) {
      const double step = there[j] - here[j];
      dot += step * (toward[j] - here[j]);
      n2 += step * step;
    }
    const double cosine = dot / std::sqrt(n2 * dir_norm2);
    if (cosine > best_cos) {
      best_cos = cosine;
      best = m;
    }
  }
  return best;
}

}  // namespace

std::optional<CompositeVertex> informed_any_goal_expansion(
    const ImplicitGraph& graph, const ProblemSpec& problem,
    const GoalPolicies& policies, const CompositeVertex* v_last,
    const CompositeVertex& v_near, const CompositeState* x_rand,
    const PlannerConfig& config, RandomEngine& rng) {
  CompositeVertex v_new;
  v_new.node_ids.resize(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const NodeId here = v_near.node_ids[i];
    if (v_last == nullptr) {
      if (config.freeze_any_goal && problem.goals[i].any_goal) {
        v_new.node_ids[i] = here;
      } else if (config.expansion_rule == ExpansionRule::DirectionOracle && x_rand) {
        v_new.node_ids[i] = directed_neighbor(graph.roadmap(i), here, x_rand->configs[i]);
      } else {
        v_new.node_ids[i] = random_neighbor(graph.roadmap(i), here, rng);
      }
    } else {
      if (problem.goals[i].any_goal) {
        v_new.node_ids[i] = here;
      } else {
        const NodeId hop = policies.per_robot[i]->next_hop[here];
        if (hop == kNoHop) return std::nullopt;
        v_new.node_ids[i] = hop;  // next_hop(g) = g keeps finished robots put
      }
    }
  }
  return v_new;
}

bool update_best(const SearchTree& tree, std::vector<CompositeVertex>& best_path,
                 double& best_cost) {
  if (tree.goal_hits().empty()) return false;
  std::int32_t best_hit = -1;
  double best_hit_cost = kInfiniteCost;
  for (std::int32_t v : tree.goal_hits()) {
    if (tree.cost(v) < best_hit_cost) {
      best_hit_cost = tree.cost(v);
      best_hit = v;
    }
  }
  if (best_hit < 0 || !(best_hit_cost < best_cost)) return false;
  best_cost = best_hit_cost;
  best_path = tree.path_from_root(best_hit);
  return true;
}

namespace {

// Memoized composite-edge validity. The check is deterministic and symmetric,
// and the same edges recur heavily inside one planner run.
class EdgeValidityCache {
 public:
  explicit EdgeValidityCache(const ImplicitGraph& graph) : graph_(&graph) {}

  bool valid(const CompositeVertex& v, const CompositeVertex& w) {
    key_.clear();
    const bool v_first = std::lexicographical_compare(
        v.node_ids.begin(), v.node_ids.end(), w.node_ids.begin(), w.node_ids.end());
    const CompositeVertex& lo = v_first ? v : w;
    const CompositeVertex& hi = v_first ? w : v;
    key_.insert(key_.end(), lo.node_ids.begin(), lo.node_ids.end());
    key_.insert(key_.end(), hi.node_ids.begin(), hi.node_ids.end());
    const auto it = cache_.find(key_);
    if (it != cache_.end()) return it->second;
    const bool ok = is_edge_valid(*graph_, v, w);
    if (cache_.size() >= kMaxEntries) cache_.clear();
    cache_.emplace(key_, ok);
    return ok;
  }

 private:
  struct VecHash {
    std::size_t operator()(const std::vector<NodeId>& v) const {
      std::size_t h = 0xcbf29ce484222325ULL;
      for (NodeId x : v) {
        h ^= x;
        h *= 0x100000001b3ULL;
      }
      return h;
    }
  };
  static constexpr std::size_t kMaxEntries = 1u << 22;

  const ImplicitGraph* graph_;
  std::vector<NodeId> key_;
  std::unordered_map<std::vector<NodeId>, bool, VecHash> cache_;
};

class Stopwatch {
 public:
  explicit Stopwatch(std::uint64_t synthetic_ns_per_iteration)
      : synthetic_(synthetic_ns_per_iteration),
        start_(std::chrono::steady_clock::now()) {}

  std::uint64_t elapsed_ns(std::uint64_t iterations) const {
    if (synthetic_ > 0) return synthetic_ * iterations;
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now() - start_)
            .count());
  }

 private:
  std::uint64_t synthetic_;
  std::chrono::steady_clock::time_point start_;
};

PlanResult run_planner(const ImplicitGraph& graph, const ProblemSpec& problem,
                       const PlannerConfig& config, bool rewire_cycle) {
  graph.validate();
  problem.validate(graph);
  config.validate();

  const GoalPolicies policies = make_goal_policies(graph, problem);
  RandomEngine rng(config.seed);
  SearchTree tree(graph, problem.start);

  PlanResult result;
  PlanStats& stats = result.stats;
  Stopwatch clock(config.synthetic_ns_per_iteration);

  auto record_improvement = [&](std::uint64_t iteration) {
    const std::uint64_t now = clock.elapsed_ns(iteration);
    if (!stats.solved) {
      stats.solved = true;
      stats.time_to_first_ns = now;
      stats.cost_first = result.best_cost;
    }
    stats.timeline.push_back(CostSample{iteration, now, result.best_cost});
  };

  if (goal_satisfied(problem, problem.start)) {
    tree.mark_goal_hit(0);
    update_best(tree, result.best_path, result.best_cost);
    record_improvement(0);
  }

  std::uint64_t last_improve_iter = 0;
  double convergence_anchor = kInfiniteCost;
  EdgeValidityCache validity(graph);

  auto ptc_fired = [&]() {
    if (config.max_iterations && stats.iterations >= *config.max_iterations) {
      return true;
    }
    if (config.time_limit_s || config.solution_hold_s) {
      const std::uint64_t now = clock.elapsed_ns(stats.iterations);
      if (config.time_limit_s &&
          now >= static_cast<std::uint64_t>(*config.time_limit_s * 1e9)) {
        return true;
      }
      if (config.solution_hold_s && stats.solved &&
          now >= static_cast<std::uint64_t>(*config.solution_hold_s * 1e9)) {
        return true;
      }
    }
    if (config.stop_at_first_solution && stats.solved) return true;
    if (config.cost_convergence && stats.solved &&
        stats.iterations - last_improve_iter >= config.cost_convergence->window) {
      return true;
    }
    return false;
  };

  std::optional<std::int32_t> v_last = 0;  // root; the first iteration is goal-directed
  CompositeState x_rand;
  std::vector<double> x_rand_flat;

  while (!ptc_fired()) {
    ++stats.iterations;
    const std::uint64_t iter = stats.iterations;

    std::int32_t v_near_idx;
    const CompositeVertex* v_last_ptr = nullptr;
    const CompositeState* x_rand_ptr = nullptr;
    if (v_last) {
      v_near_idx = *v_last;
      v_last_ptr = &tree.node(v_near_idx).vertex;
    } else {
      x_rand = sample_random(graph, rng);
      x_rand_flat = flatten(x_rand);
      v_near_idx = tree.nearest(x_rand_flat);
      x_rand_ptr = &x_rand;
    }
    v_last.reset();

    const auto v_new_opt = informed_any_goal_expansion(
        graph, problem, policies, v_last_ptr, tree.node(v_near_idx).vertex,
        x_rand_ptr, config, rng);
    if (!v_new_opt) continue;
    const CompositeVertex& v_new = *v_new_opt;
    if (v_new == tree.node(v_near_idx).vertex) continue;  // no component moved

    std::int32_t parent_idx = v_near_idx;
    if (rewire_cycle) {
      // dRRT* rewiring cycle, step 1: best valid parent among tree vertices
      // adjacent to v_new in the implicit graph.
      std::vector<std::pair<double, std::int32_t>> candidates;
      for (std::size_t i = 0; i < tree.size(); ++i) {
        const std::int32_t w = static_cast<std::int32_t>(i);
        if (!is_composite_neighbor(graph, tree.node(w).vertex, v_new)) continue;
        candidates.emplace_back(
            tree.cost(w) + edge_cost(graph, tree.node(w).vertex, v_new), w);
      }
      std::sort(candidates.begin(), candidates.end());
      for (const auto& [c, w] : candidates) {
        if (validity.valid(tree.node(w).vertex, v_new)) {
          parent_idx = w;
          break;
        }
      }
    }

    const double cost_vnew =
        tree.cost(parent_idx) +
        edge_cost(graph, tree.node(parent_idx).vertex, v_new);
    if (cost_vnew > result.best_cost) continue;
    if (!validity.valid(tree.node(parent_idx).vertex, v_new)) continue;

    std::int32_t new_idx;
    if (const auto existing = tree.find(v_new)) {
      if (cost_vnew >= tree.cost(*existing)) continue;
      if (tree.is_ancestor(*existing, parent_idx)) continue;  // would cycle
      tree.rewire(*existing, parent_idx, cost_vnew);
      new_idx = *existing;
    } else {
      new_idx = tree.insert(v_new, parent_idx, cost_vnew);
      if (goal_satisfied(problem, v_new)) tree.mark_goal_hit(new_idx);
    }

    if (rewire_cycle) {
      // dRRT* rewiring cycle, step 2: pull tree-resident neighbors of v_new
      // through it when that lowers their cost.
      for (std::size_t i = 0; i < tree.size(); ++i) {
        const std::int32_t w = static_cast<std::int32_t>(i);
        if (w == new_idx) continue;
        if (!is_composite_neighbor(graph, v_new, tree.node(w).vertex)) continue;
        const double c =
            tree.cost(new_idx) + edge_cost(graph, v_new, tree.node(w).vertex);
        if (c >= tree.cost(w)) continue;
        if (tree.is_ancestor(w, new_idx)) continue;
        if (!validity.valid(v_new, tree.node(w).vertex)) continue;
        tree.rewire(w, new_idx, c);
      }
    }

    if (update_best(tree, result.best_path, result.best_cost)) {
      record_improvement(iter);
      // Convergence window restarts only on improvements beyond epsilon.
      if (!config.cost_convergence ||
          convergence_anchor - result.best_cost > config.cost_convergence->epsilon) {
        convergence_anchor = result.best_cost;
        last_improve_iter = iter;
      }
    }
    v_last = new_idx;

    if (config.check_invariants) tree.check_consistency(graph, 1e-9);
  }

  return result;
}

}  // namespace

PlanResult plan(const ImplicitGraph& graph, const ProblemSpec& problem,
                const PlannerConfig& config) {
  return run_planner(graph, problem, config, false);
}

PlanResult plan_drrt_star(const ImplicitGraph& graph, const ProblemSpec& problem,
                          const PlannerConfig& config) {
  return run_planner(graph, problem, config, config.drrt_rewire_cycle);
}

PlanResult plan_with_mode(const ImplicitGraph& graph, const ProblemSpec& problem,
                          const PlannerConfig& config) {
  return config.mode == PlannerMode::DRRTStar ? plan_drrt_star(graph, problem, config)
                                              : plan(graph, problem, config);
}

}  // namespace fdrrt
