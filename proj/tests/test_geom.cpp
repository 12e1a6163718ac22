#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "fdrrt/geom.hpp"
#include "fdrrt/rng.hpp"
#include "test_helpers.hpp"

using namespace fdrrt;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent endpoint oracle: accumulate rotations as complex products.
std::vector<Vec2> complex_chain_endpoints(const RobotModel& robot,
                                          const Configuration& q) {
  std::vector<Vec2> pts;
  std::complex<double> pos{robot.base.x, robot.base.y};
  std::complex<double> rot{1.0, 0.0};
  for (std::size_t j = 0; j < q.size(); ++j) {
    rot *= std::polar(1.0, q[j]);
    pos += robot.link_lengths[j] * rot;
    pts.push_back({pos.real(), pos.imag()});
  }
  return pts;
}

// Dense point-membership oracle for capsule overlap: sample points on one
// capsule's surface and interior and test membership in the other.
bool capsules_overlap_sampled(const Capsule& a, const Capsule& b, int n) {
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const Vec2 axis = a.a + t * (a.b - a.a);
    for (int k = 0; k < 32; ++k) {
      const double ang = 2.0 * kPi * k / 32;
      for (double frac : {0.0, 0.5, 1.0}) {
        const Vec2 p = axis + (frac * a.radius) * Vec2{std::cos(ang), std::sin(ang)};
        if (point_segment_distance(p, b.a, b.b) <= b.radius) return true;
      }
    }
  }
  return false;
}

}  // namespace

TEST_CASE("forward kinematics: zero-angle chain lies along +x") {
  const RobotModel r = test::two_link({0, 0}, 1.0, 1.0, 0.1);
  const auto caps = forward_kinematics(r, {0.0, 0.0});
  REQUIRE(caps.size() == 2);
  CHECK(caps[0].a.x == doctest::Approx(0.0));
  CHECK(caps[0].b.x == doctest::Approx(1.0));
  CHECK(caps[0].b.y == doctest::Approx(0.0));
  CHECK(caps[1].b.x == doctest::Approx(2.0));
  CHECK(caps[1].b.y == doctest::Approx(0.0));
  CHECK(caps[0].radius == doctest::Approx(0.1));
}

TEST_CASE("forward kinematics: quarter-turn shoulder") {
  const RobotModel r = test::two_link({0, 0}, 1.0, 1.0, 0.1);
  const auto caps = forward_kinematics(r, {kPi / 2, 0.0});
  CHECK(caps[0].b.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(caps[0].b.y == doctest::Approx(1.0));
  CHECK(caps[1].b.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(caps[1].b.y == doctest::Approx(2.0));
}

TEST_CASE("forward kinematics matches complex-rotation oracle on random chains") {
  RandomEngine rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    RobotModel r;
    r.base = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
    r.link_lengths = {rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5),
                      rng.uniform(0.2, 1.5)};
    r.link_radius = 0.05;
    r.joint_limits = {{-kPi, kPi}, {-kPi, kPi}, {-kPi, kPi}};
    const Configuration q = {rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi),
                             rng.uniform(-kPi, kPi)};
    const auto caps = forward_kinematics(r, q);
    const auto oracle = complex_chain_endpoints(r, q);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(caps[j].b.x == doctest::Approx(oracle[j].x).epsilon(1e-10));
      CHECK(caps[j].b.y == doctest::Approx(oracle[j].y).epsilon(1e-10));
    }
    // Consecutive capsules share an endpoint exactly.
    CHECK(caps[0].b.x == caps[1].a.x);
    CHECK(caps[1].b.y == caps[2].a.y);
  }
}

TEST_CASE("forward kinematics rejects dimension mismatch") {
  const RobotModel r = test::one_link({0, 0});
  CHECK_THROWS_AS(forward_kinematics(r, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("capsule-capsule: parallel capsules with a gap") {
  const Capsule a{{0, 0}, {1, 0}, 0.1};
  const Capsule b{{0, 1}, {1, 1}, 0.1};
  CHECK_FALSE(capsule_capsule_collide(a, b));
}

TEST_CASE("capsule-capsule: identical capsules collide") {
  const Capsule a{{0.3, -0.2}, {1, 0.5}, 0.05};
  CHECK(capsule_capsule_collide(a, a));
}

TEST_CASE("capsule-capsule: crossing distance 0.5 vs radii sum 0.6") {
  const Capsule a{{0, 0}, {1, 0}, 0.3};
  const Capsule b{{0.5, 0.5}, {0.5, 2}, 0.3};
  CHECK(capsule_capsule_collide(a, b));
  CHECK(capsules_overlap_sampled(a, b, 400));
}

TEST_CASE("capsule-capsule agrees with dense sampling oracle") {
  RandomEngine rng(11);
  int positives = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Capsule a{{rng.uniform(-1, 1), rng.uniform(-1, 1)},
                    {rng.uniform(-1, 1), rng.uniform(-1, 1)},
                    rng.uniform(0.05, 0.4)};
    const Capsule b{{rng.uniform(-1, 1), rng.uniform(-1, 1)},
                    {rng.uniform(-1, 1), rng.uniform(-1, 1)},
                    rng.uniform(0.05, 0.4)};
    const bool exact = capsule_capsule_collide(a, b);
    CHECK(capsule_capsule_collide(b, a) == exact);  // symmetry
    if (capsules_overlap_sampled(a, b, 200)) {
      // Sampled overlap can only under-report, never over-report.
      CHECK(exact);
    }
    positives += exact ? 1 : 0;
  }
  CHECK(positives > 50);  // the draw actually exercises both outcomes
  CHECK(positives < 300);
}

TEST_CASE("config_collides: straight two-link arm in empty space") {
  const RobotModel r = test::two_link({0, 0});
  CHECK_FALSE(config_collides(r, {0.0, 0.0}, {}));
}

TEST_CASE("config_collides: disc swallowing a link midpoint") {
  const RobotModel r = test::one_link({0, 0}, 1.0, 0.05);
  const std::vector<Obstacle> obs = {Obstacle::disc({0.5, 0.0}, 0.2)};
  CHECK(config_collides(r, {0.0}, obs));
}

TEST_CASE("config_collides: self-collision of folded three-link arm") {
  RobotModel r;
  r.base = {0, 0};
  r.link_lengths = {1.0, 1.0, 1.0};
  r.link_radius = 0.05;
  r.joint_limits = {{-3.2, 3.2}, {-3.2, 3.2}, {-3.2, 3.2}};
  // Fold link 3 back onto link 1.
  CHECK(config_collides(r, {0.0, 3.0, 3.0}, {}));
  CHECK_FALSE(config_collides(r, {0.0, 0.3, 0.3}, {}));
}

TEST_CASE("config_collides agrees with link-surface rasterization oracle") {
  RandomEngine rng(13);
  for (int trial = 0; trial < 120; ++trial) {
    const RobotModel r = test::two_link({rng.uniform(-0.5, 0.5), 0.0});
    std::vector<Obstacle> obs;
    obs.push_back(Obstacle::disc({rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)},
                                 rng.uniform(0.1, 0.5)));
    obs.push_back(Obstacle::rect({rng.uniform(-1.5, 0.0), rng.uniform(-1.5, 0.0)},
                                 {rng.uniform(0.1, 1.5), rng.uniform(0.1, 1.5)}));
    const Configuration q = {rng.uniform(-3, 3), rng.uniform(-3, 3)};

    // Oracle: dense points on each link's boundary circle sweep.
    bool sampled_hit = false;
    for (const Capsule& link : forward_kinematics(r, q)) {
      for (int i = 0; i <= 100 && !sampled_hit; ++i) {
        const Vec2 axis = link.a + (static_cast<double>(i) / 100) * (link.b - link.a);
        for (int k = 0; k < 100 && !sampled_hit; ++k) {
          const double ang = 2.0 * kPi * k / 100;
          const Vec2 p = axis + link.radius * Vec2{std::cos(ang), std::sin(ang)};
          for (const Obstacle& o : obs) {
            const bool inside =
                o.kind == Obstacle::Kind::Disc
                    ? norm(p - o.center) <= o.radius
                    : (p.x >= o.min_corner.x && p.x <= o.max_corner.x &&
                       p.y >= o.min_corner.y && p.y <= o.max_corner.y);
            if (inside) sampled_hit = true;
          }
        }
      }
    }
    if (sampled_hit) {
      CHECK(config_collides(r, q, obs));
    }
  }
}

TEST_CASE("motion_collides: stationary motion equals config check") {
  const RobotModel r = test::one_link({0, 0}, 1.0, 0.05);
  const std::vector<Obstacle> obs = {Obstacle::disc({0.5, 0.5}, 0.2)};
  const Configuration q = {0.0};
  CHECK(motion_collides(r, q, q, obs, 0.1) == config_collides(r, q, obs));
  CHECK_FALSE(motion_collides(r, q, q, {}, 0.1));
}

TEST_CASE("motion_collides: obstacle blocking mid-swing only") {
  const RobotModel r = test::one_link({0, 0}, 1.0, 0.05);
  // Disc sits on the arc halfway between the two endpoints.
  const std::vector<Obstacle> obs = {Obstacle::disc({1.0, 0.0}, 0.1)};
  const Configuration a = {-1.0}, b = {1.0};
  CHECK_FALSE(config_collides(r, a, obs));
  CHECK_FALSE(config_collides(r, b, obs));
  CHECK(motion_collides(r, a, b, obs, 0.05));
  CHECK(motion_collides(r, a, b, obs, 0.005));  // re-check at step/10
}

TEST_CASE("motion_collides: empty environment never collides") {
  const RobotModel r = test::two_link({0, 0});
  RandomEngine rng(3);
  for (int i = 0; i < 50; ++i) {
    const Configuration a = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Configuration b = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
    CHECK_FALSE(motion_collides(r, a, b, {}, 0.1));
  }
}

TEST_CASE("motion_collides: refinement is monotone on the sampled set") {
  const RobotModel r = test::one_link({0, 0}, 1.0, 0.05);
  RandomEngine rng(17);
  for (int i = 0; i < 100; ++i) {
    const std::vector<Obstacle> obs = {
        Obstacle::disc({rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)},
                       rng.uniform(0.05, 0.3))};
    const Configuration a = {rng.uniform(-2.5, 2.5)};
    const Configuration b = {rng.uniform(-2.5, 2.5)};
    const double step = rng.uniform(0.05, 1.0);
    if (motion_collides(r, a, b, obs, step)) {
      CHECK(motion_collides(r, a, b, obs, step / 2));
      CHECK(motion_collides(r, a, b, obs, step / 4));
    }
  }
}

TEST_CASE("model validation rejects bad inputs") {
  RobotModel r = test::one_link({0, 0});
  CHECK_NOTHROW(r.validate());
  r.link_radius = 0.0;
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  r = test::one_link({0, 0});
  r.joint_limits[0] = {1.0, 1.0};
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  CHECK_THROWS_AS(Obstacle::disc({0, 0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Obstacle::rect({1, 0}, {0, 1}), std::invalid_argument);
}
