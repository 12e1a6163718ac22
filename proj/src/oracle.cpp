#include "fdrrt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "fdrrt/errors.hpp"

namespace fdrrt {

std::uint64_t ExplicitProductGraph::index_of(const CompositeVertex& v) const {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < radices.size(); ++i) {
    idx = idx * radices[i] + v.node_ids[i];
  }
  return idx;
}

CompositeVertex ExplicitProductGraph::vertex_at(std::uint64_t index) const {
  CompositeVertex v;
  v.node_ids.resize(radices.size());
  for (std::size_t i = radices.size(); i-- > 0;) {
    v.node_ids[i] = static_cast<NodeId>(index % radices[i]);
    index /= radices[i];
  }
  return v;
}

ExplicitProductGraph build_explicit(const ImplicitGraph& graph,
                                    std::uint64_t cap) {
  graph.validate();
  ExplicitProductGraph out;
  out.vertex_count = 1;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const std::uint64_t n = graph.roadmap(i).nodes.size();
    out.radices.push_back(static_cast<std::uint32_t>(n));
    if (n == 0 || out.vertex_count > cap / n) {
      throw ConfigError("build_explicit: product graph exceeds the vertex cap");
    }
    out.vertex_count *= n;
  }
  out.adjacency.resize(out.vertex_count);

  // Per-robot move options: stay plus every incident edge.
  const std::size_t n_robots = graph.size();
  std::vector<NodeId> choice(n_robots);

  for (std::uint64_t u = 0; u < out.vertex_count; ++u) {
    const CompositeVertex vu = out.vertex_at(u);
    // Enumerate all combinations of per-robot moves by recursion over robots.
    std::function<void(std::size_t, bool)> enumerate = [&](std::size_t i,
                                                           bool moved) {
      if (i == n_robots) {
        if (!moved) return;  // all-stay excluded
        CompositeVertex vw;
        vw.node_ids.assign(choice.begin(), choice.end());
        const std::uint64_t w = out.index_of(vw);
        if (w <= u) return;  // add each undirected edge once
        if (!is_edge_valid(graph, vu, vw)) return;
        const double c = edge_cost(graph, vu, vw);
        out.adjacency[u].emplace_back(w, c);
        out.adjacency[w].emplace_back(u, c);
        return;
      }
      choice[i] = vu.node_ids[i];
      enumerate(i + 1, moved);
      for (EdgeId e : graph.roadmap(i).adjacency[vu.node_ids[i]]) {
        choice[i] = graph.roadmap(i).other_end(e, vu.node_ids[i]);
        enumerate(i + 1, true);
      }
    };
    enumerate(0, false);
  }
  return out;
}

OracleResult optimal_cost(
    const ExplicitProductGraph& graph, const CompositeVertex& start,
    const std::function<bool(const CompositeVertex&)>& goal_predicate) {
  const std::uint64_t s = graph.index_of(start);
  if (s >= graph.vertex_count) {
    throw std::invalid_argument("optimal_cost: start outside the graph");
  }
  std::vector<double> dist(graph.vertex_count,
                           std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> parent(graph.vertex_count, -1);
  using Item = std::pair<double, std::uint64_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[s] = 0.0;
  heap.emplace(0.0, s);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (goal_predicate(graph.vertex_at(u))) {
      OracleResult res;
      res.cost = d;
      for (std::int64_t cur = static_cast<std::int64_t>(u); cur >= 0;
           cur = parent[static_cast<std::uint64_t>(cur)]) {
        res.path.push_back(graph.vertex_at(static_cast<std::uint64_t>(cur)));
      }
      std::reverse(res.path.begin(), res.path.end());
      return res;
    }
    for (const auto& [w, c] : graph.adjacency[u]) {
      if (d + c < dist[w]) {
        dist[w] = d + c;
        parent[w] = static_cast<std::int64_t>(u);
        heap.emplace(dist[w], w);
      }
    }
  }
  OracleResult res;
  res.cost = std::numeric_limits<double>::infinity();
  return res;
}

bool exact_swept_overlap(const RobotModel& robot_i, const Motion& motion_i,
                         const RobotModel& robot_j, const Motion& motion_j,
                         double sample_step, double radius_margin) {
  if (!(sample_step > 0.0)) {
    throw std::invalid_argument("exact_swept_overlap: sample_step must be > 0");
  }
  auto sample_capsules = [&](const RobotModel& robot, const Motion& motion) {
    std::vector<std::vector<Capsule>> frames;
    const double dist = config_distance(motion.from, motion.to);
    std::size_t intervals = 1;
    while (static_cast<double>(intervals) * sample_step < dist) intervals *= 2;
    if (dist == 0.0) intervals = 1;
    Configuration q(motion.from.size());
    const std::size_t last = dist == 0.0 ? 0 : intervals;
    for (std::size_t k = 0; k <= last; ++k) {
      const double t =
          last == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(last);
      for (std::size_t j = 0; j < q.size(); ++j) {
        q[j] = motion.from[j] + t * (motion.to[j] - motion.from[j]);
      }
      frames.push_back(forward_kinematics(robot, q));
      if (radius_margin != 0.0) {
        for (Capsule& c : frames.back()) c.radius += radius_margin;
      }
    }
    return frames;
  };
  const auto frames_i = sample_capsules(robot_i, motion_i);
  const auto frames_j = sample_capsules(robot_j, motion_j);

  // Per-frame bounding boxes let distant frame pairs skip the capsule loops.
  auto frame_box = [](const std::vector<Capsule>& frame) {
    Box b{{1e300, 1e300}, {-1e300, -1e300}};
    for (const Capsule& c : frame) {
      b.min.x = std::min({b.min.x, c.a.x - c.radius, c.b.x - c.radius});
      b.min.y = std::min({b.min.y, c.a.y - c.radius, c.b.y - c.radius});
      b.max.x = std::max({b.max.x, c.a.x + c.radius, c.b.x + c.radius});
      b.max.y = std::max({b.max.y, c.a.y + c.radius, c.b.y + c.radius});
    }
    return b;
  };
  std::vector<Box> boxes_i, boxes_j;
  boxes_i.reserve(frames_i.size());
  boxes_j.reserve(frames_j.size());
  for (const auto& f : frames_i) boxes_i.push_back(frame_box(f));
  for (const auto& f : frames_j) boxes_j.push_back(frame_box(f));

  for (std::size_t fi = 0; fi < frames_i.size(); ++fi) {
    for (std::size_t fj = 0; fj < frames_j.size(); ++fj) {
      const Box& bi = boxes_i[fi];
      const Box& bj = boxes_j[fj];
      if (bi.max.x < bj.min.x || bj.max.x < bi.min.x || bi.max.y < bj.min.y ||
          bj.max.y < bi.min.y) {
        continue;
      }
      for (const Capsule& a : frames_i[fi]) {
        for (const Capsule& b : frames_j[fj]) {
          if (capsule_capsule_collide(a, b)) return true;
        }
      }
    }
  }
  return false;
}

}  // namespace fdrrt
