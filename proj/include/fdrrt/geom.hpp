#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace fdrrt {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::sqrt(dot(v, v)); }

struct JointLimit {
  double lower = 0.0;
  double upper = 0.0;
};

/// Planar serial-chain arm: revolute joints, capsule links of shared radius.
struct RobotModel {
  Vec2 base;
  std::vector<double> link_lengths;
  double link_radius = 0.0;
  std::vector<JointLimit> joint_limits;

  std::size_t num_joints() const { return link_lengths.size(); }

  /// Throws std::invalid_argument on any violated model invariant.
  void validate() const;
};

/// Joint angles in radians, one per link.
using Configuration = std::vector<double>;

struct Capsule {
  Vec2 a;
  Vec2 b;
  double radius = 0.0;
};

struct Obstacle {
  enum class Kind { Disc, Rect };
  Kind kind = Kind::Disc;
  Vec2 center;           // disc
  double radius = 0.0;   // disc
  Vec2 min_corner;       // rect
  Vec2 max_corner;       // rect

  static Obstacle disc(Vec2 center, double radius);
  static Obstacle rect(Vec2 min_corner, Vec2 max_corner);
};

double config_distance(const Configuration& a, const Configuration& b);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double segment_segment_distance(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2);

/// One capsule per link; link j spans joint j to joint j+1 under the
/// cumulative angle sum. Throws std::invalid_argument on dimension mismatch.
std::vector<Capsule> forward_kinematics(const RobotModel& robot,
                                        const Configuration& q);

bool capsule_capsule_collide(const Capsule& a, const Capsule& b);
bool capsule_obstacle_collide(const Capsule& c, const Obstacle& o);

/// Environment collision plus self-collision between non-adjacent links.
bool config_collides(const RobotModel& robot, const Configuration& q,
                     const std::vector<Obstacle>& obstacles);

/// Straight-segment motion check, sampled at spacing <= step in
/// configuration-space L2, endpoints included.
bool motion_collides(const RobotModel& robot, const Configuration& q_a,
                     const Configuration& q_b,
                     const std::vector<Obstacle>& obstacles, double step);

bool within_joint_limits(const RobotModel& robot, const Configuration& q);

}  // namespace fdrrt
