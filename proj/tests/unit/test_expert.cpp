#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "drivelab/controllers.hpp"
#include "drivelab/expert.hpp"

using namespace drivelab;

namespace {

State state_at(const Vec2& pos, double heading, double speed = 20.0) {
  return {pos, speed * unit_from_angle(heading)};
}

Scenario straight_with_cone(double arc_length = 150.0, double lateral = 0.0) {
  ScenarioSpec spec;
  spec.kind = RoadKind::Straight;
  ScenarioSpec::ObstacleSpec ob;
  ob.arc_length = arc_length;
  ob.lateral = lateral;
  spec.obstacles.push_back(ob);
  return build_scenario(spec);
}

ExpertParams road_params() {
  ExpertParams p;
  p.horizon = 1.5;
  return p;
}

}  // namespace

TEST_CASE("p is 1 in contact and 0 far away") {
  const VehicleSpec vehicle;
  const Scenario scenario = straight_with_cone();
  const CollisionField field(scenario, vehicle, road_params());
  const Vec2 cone = scenario.obstacles[0].position0;

  // Overlapping footprint: p(s, (0,0,0)) > 0 marks the accident frame.
  CHECK(field.probability(state_at(cone, 0.0), {}) == doctest::Approx(1.0));
  // 100 m from everything.
  CHECK(field.probability(state_at(cone - Vec2{100.0, 0.0}, 0.0), {{0.0, 0.0}, 0.1}) == 0.0);
}

TEST_CASE("p decays monotonically with clearance and is interior at r/2") {
  const VehicleSpec vehicle;
  const Scenario scenario = straight_with_cone();
  const ExpertParams params = road_params();
  const CollisionField field(scenario, vehicle, params);
  const Obstacle& ob = scenario.obstacles[0];

  // March the vehicle backward from the cone; clearance grows with distance.
  const double front = vehicle.length - vehicle.rear_axle_to_rear;
  auto p_at_clearance = [&](double clearance) {
    const double x = ob.position0.x() - ob.radius - front - clearance;
    return field.probability(state_at({x, ob.position0.y()}, 0.0), {});
  };

  const double mid = p_at_clearance(params.smoothing_radius / 2.0);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  CHECK(p_at_clearance(params.smoothing_radius + 0.01) == 0.0);

  double prev = 2.0;
  for (double c = 0.0; c <= params.smoothing_radius + 0.5; c += 0.05) {
    const double p = p_at_clearance(c);
    CHECK(p <= prev + 1e-12);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    prev = p;
  }
}

TEST_CASE("trajectory probability sees ahead but not behind") {
  const VehicleSpec vehicle;
  const Scenario scenario = straight_with_cone();
  ExpertParams params = road_params();
  params.horizon = 2.0;
  const CollisionField field(scenario, vehicle, params);
  const Vec2 cone = scenario.obstacles[0].position0;

  // Obstacle dead ahead at 20 m: the 1 s prediction point overlaps.
  CHECK(field.trajectory_probability(state_at(cone - Vec2{20.0, 0.0}, 0.0)) > 0.0);
  // Receding geometry.
  CHECK(field.trajectory_probability(state_at(cone + Vec2{5.0, 0.0}, 0.0)) == 0.0);

  ScenarioSpec empty;
  empty.kind = RoadKind::OpenGround;
  empty.length = 1000.0;
  empty.target = Vec2{900.0, 500.0};
  const Scenario open = build_scenario(empty);
  const CollisionField empty_field(open, vehicle, params);
  CHECK(empty_field.trajectory_probability(state_at({100.0, 500.0}, 0.0)) == 0.0);
}

TEST_CASE("velocity proposal behavior") {
  const VehicleSpec vehicle;
  const Scenario scenario = straight_with_cone();
  const CollisionField field(scenario, vehicle, road_params());
  const Vec2 cone = scenario.obstacles[0].position0;

  SUBCASE("clear road keeps the current velocity") {
    const State s = state_at({10.0, scenario.road.right_lane_center()}, 0.0);
    const VelocityProposal prop = field.propose_velocity(s);
    CHECK(prop.heading_change == 0.0);
    CHECK((prop.velocity - s.velocity).norm() == doctest::Approx(0.0));
  }
  SUBCASE("symmetric head-on threat deviates left in the right lane") {
    const State s = state_at(cone - Vec2{25.0, 0.0}, 0.0);
    const VelocityProposal prop = field.propose_velocity(s);
    CHECK(prop.heading_change > 0.0);
  }
  SUBCASE("fully blocked cone still returns the argmin") {
    const State s = state_at(cone - Vec2{3.0, 0.0}, 0.0);
    const VelocityProposal prop = field.propose_velocity(s);
    CHECK(prop.probability > 0.0);  // unavoidable this late, argmin is total
  }
  SUBCASE("proposal never increases the trajectory probability") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dx(5.0, 60.0);
    std::uniform_real_distribution<double> dy(-4.0, 4.0);
    std::uniform_real_distribution<double> dh(-0.3, 0.3);
    for (int i = 0; i < 60; ++i) {
      const State s = state_at(cone - Vec2{dx(rng), dy(rng)}, dh(rng));
      const double keep = field.trajectory_probability(s);
      const VelocityProposal prop = field.propose_velocity(s);
      CHECK(prop.probability <= keep + 1e-12);
    }
  }
}

TEST_CASE("expert rollout from an endangered state is collision-free") {
  const VehicleSpec vehicle;
  const Scenario scenario = straight_with_cone();
  const CollisionField field(scenario, vehicle, road_params());
  const Vec2 cone = scenario.obstacles[0].position0;

  const State start = state_at(cone - Vec2{30.0, 0.0}, 0.0);
  const Trajectory traj = expert_rollout(field, start);
  CHECK(traj.states.front().position == start.position);
  CHECK(traj.states.front().velocity == start.velocity);
  CHECK(coll(field, traj).empty());

  // The rollout passes the obstacle and returns toward the lane.
  const State& last = traj.states.back();
  CHECK(last.position.x() > cone.x() + 5.0);
}

TEST_CASE("coll matches a separating-axis oracle on a hand-built grazing pass") {
  const VehicleSpec vehicle;
  const Scenario scenario = straight_with_cone();
  const ExpertParams params = road_params();
  const CollisionField field(scenario, vehicle, params);
  const Obstacle& ob = scenario.obstacles[0];

  // Frames either overlap the cone or sit far beyond the smoothing radius, so
  // the probability threshold and the hard footprint test agree frame by frame.
  Trajectory traj;
  traj.dt = kDefaultDt;
  std::vector<bool> oracle;
  for (int k = 0; k < 10; ++k) {
    double lateral;
    if (k >= 4 && k <= 6) {
      lateral = 0.0;  // drive straight through the cone
    } else {
      lateral = 10.0;  // far abeam
    }
    const State s = state_at({ob.position0.x(), ob.position0.y() + lateral}, 0.0);
    traj.states.push_back(s);
    traj.steers.push_back(0.0);
    oracle.push_back(overlaps(vehicle_footprint(s, vehicle), Disc{ob.position0, ob.radius}));
  }

  const auto colliding = coll(field, traj);
  std::vector<std::size_t> expected;
  for (std::size_t k = 0; k < oracle.size(); ++k) {
    if (oracle[k]) expected.push_back(k);
  }
  CHECK(colliding == expected);
}
