#include "fdrrt/geom.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fdrrt {

void RobotModel::validate() const {
  if (link_lengths.empty()) {
    throw std::invalid_argument("RobotModel: link_lengths must be non-empty");
  }
  for (double len : link_lengths) {
    if (!(len > 0.0)) {
      throw std::invalid_argument("RobotModel: link lengths must be > 0");
    }
  }
  if (!(link_radius > 0.0)) {
    throw std::invalid_argument("RobotModel: link_radius must be > 0");
  }
  if (joint_limits.size() != link_lengths.size()) {
    throw std::invalid_argument("RobotModel: one joint limit per link required");
  }
  for (const auto& lim : joint_limits) {
    if (!(lim.lower < lim.upper)) {
      throw std::invalid_argument("RobotModel: joint limit lower must be < upper");
    }
  }
}

Obstacle Obstacle::disc(Vec2 center, double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("Obstacle::disc: radius must be > 0");
  }
  Obstacle o;
  o.kind = Kind::Disc;
  o.center = center;
  o.radius = radius;
  return o;
}

Obstacle Obstacle::rect(Vec2 min_corner, Vec2 max_corner) {
  if (!(min_corner.x < max_corner.x) || !(min_corner.y < max_corner.y)) {
    throw std::invalid_argument("Obstacle::rect: min corner must be < max corner");
  }
  Obstacle o;
  o.kind = Kind::Rect;
  o.min_corner = min_corner;
  o.max_corner = max_corner;
  return o;
}

double config_distance(const Configuration& a, const Configuration& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("config_distance: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return norm(p - a);
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

// Closest distance between segments [p1,q1] and [p2,q2].
// Clamped closed-form solution (Ericson, Real-Time Collision Detection).
double segment_segment_distance(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2) {
  const Vec2 d1 = q1 - p1;
  const Vec2 d2 = q2 - p2;
  const Vec2 r = p1 - p2;
  const double a = dot(d1, d1);
  const double e = dot(d2, d2);
  const double f = dot(d2, r);

  double s = 0.0, t = 0.0;
  if (a <= 0.0 && e <= 0.0) {
    return norm(p1 - p2);
  }
  if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      if (denom > 0.0) {
        s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      }
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  const Vec2 c1 = p1 + s * d1;
  const Vec2 c2 = p2 + t * d2;
  return norm(c1 - c2);
}

std::vector<Capsule> forward_kinematics(const RobotModel& robot,
                                        const Configuration& q) {
  if (q.size() != robot.num_joints()) {
    throw std::invalid_argument(
        "forward_kinematics: configuration has " + std::to_string(q.size()) +
        " joints, robot has " + std::to_string(robot.num_joints()));
  }
  std::vector<Capsule> links;
  links.reserve(q.size());
  Vec2 joint = robot.base;
  double angle = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    angle += q[j];
    const Vec2 tip = joint + robot.link_lengths[j] * Vec2{std::cos(angle), std::sin(angle)};
    links.push_back(Capsule{joint, tip, robot.link_radius});
    joint = tip;
  }
  return links;
}

bool capsule_capsule_collide(const Capsule& a, const Capsule& b) {
  return segment_segment_distance(a.a, a.b, b.a, b.b) <= a.radius + b.radius;
}

namespace {

// Distance from a segment to a solid axis-aligned rectangle.
double segment_rect_distance(Vec2 a, Vec2 b, Vec2 mn, Vec2 mx) {
  auto inside = [&](Vec2 p) {
    return p.x >= mn.x && p.x <= mx.x && p.y >= mn.y && p.y <= mx.y;
  };
  if (inside(a) || inside(b)) return 0.0;
  const Vec2 c00{mn.x, mn.y}, c10{mx.x, mn.y}, c11{mx.x, mx.y}, c01{mn.x, mx.y};
  double d = segment_segment_distance(a, b, c00, c10);
  d = std::min(d, segment_segment_distance(a, b, c10, c11));
  d = std::min(d, segment_segment_distance(a, b, c11, c01));
  d = std::min(d, segment_segment_distance(a, b, c01, c00));
  return d;
}

}  // namespace

bool capsule_obstacle_collide(const Capsule& c, const Obstacle& o) {
  switch (o.kind) {
    case Obstacle::Kind::Disc:
      return point_segment_distance(o.center, c.a, c.b) <= c.radius + o.radius;
    case Obstacle::Kind::Rect:
      return segment_rect_distance(c.a, c.b, o.min_corner, o.max_corner) <= c.radius;
  }
  return false;
}

bool config_collides(const RobotModel& robot, const Configuration& q,
                     const std::vector<Obstacle>& obstacles) {
  const std::vector<Capsule> links = forward_kinematics(robot, q);
  for (const Capsule& link : links) {
    for (const Obstacle& obs : obstacles) {
      if (capsule_obstacle_collide(link, obs)) return true;
    }
  }
  // Self-collision: skip adjacent pairs, they always share a joint.
  for (std::size_t i = 0; i + 2 < links.size(); ++i) {
    for (std::size_t j = i + 2; j < links.size(); ++j) {
      if (capsule_capsule_collide(links[i], links[j])) return true;
    }
  }
  return false;
}

bool motion_collides(const RobotModel& robot, const Configuration& q_a,
                     const Configuration& q_b,
                     const std::vector<Obstacle>& obstacles, double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("motion_collides: step must be > 0");
  }
  const double dist = config_distance(q_a, q_b);
  // Power-of-two interval count keeps sample sets nested as step shrinks, so
  // refinement can only add sample points.
  std::size_t intervals = 1;
  while (static_cast<double>(intervals) * step < dist) intervals *= 2;
  Configuration q(q_a.size());
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(intervals);
    for (std::size_t j = 0; j < q.size(); ++j) {
      q[j] = q_a[j] + t * (q_b[j] - q_a[j]);
    }
    if (config_collides(robot, q, obstacles)) return true;
  }
  return false;
}

bool within_joint_limits(const RobotModel& robot, const Configuration& q) {
  if (q.size() != robot.num_joints()) return false;
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j] < robot.joint_limits[j].lower || q[j] > robot.joint_limits[j].upper) {
      return false;
    }
  }
  return true;
}

}  // namespace fdrrt
