#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "drivelab/controllers.hpp"
#include "drivelab/vehicle.hpp"

using namespace drivelab;

namespace {

State state_at(const Vec2& pos, double heading, double speed = 20.0) {
  return {pos, speed * unit_from_angle(heading)};
}

ScenarioSpec straight_with_cone(double arc_length = 150.0, double lateral = 0.0) {
  ScenarioSpec spec;
  spec.kind = RoadKind::Straight;
  ScenarioSpec::ObstacleSpec ob;
  ob.arc_length = arc_length;
  ob.lateral = lateral;
  spec.obstacles.push_back(ob);
  return spec;
}

}  // namespace

TEST_CASE("straight-line step advances 0.4 m at 20 m/s") {
  const VehicleSpec spec;
  const State s0 = state_at({0.0, 0.0}, 0.0);
  const State s1 = step(s0, 0.0, spec, 0.02);
  CHECK(s1.position.x() == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(s1.position.y() == doctest::Approx(0.0));
  CHECK(s1.heading() == doctest::Approx(0.0));
}

TEST_CASE("max-steer turning circle matches wheelbase/tan(25 deg)") {
  const VehicleSpec spec;
  const double radius = spec.wheelbase() / std::tan(spec.max_steer);

  State s = state_at({0.0, 0.0}, 0.0);
  // Rear axle circle center is one radius to the left.
  const Vec2 center = s.position + radius * rotate90_left(s.heading_dir());
  for (int i = 0; i < 400; ++i) {
    s = step(s, spec.max_steer, spec, 0.02);
    CHECK((s.position - center).norm() == doctest::Approx(radius).epsilon(1e-3));
  }
}

TEST_CASE("steer commands clamp at max_steer") {
  const VehicleSpec spec;
  const State s0 = state_at({0.0, 0.0}, 0.0);
  const State a = step(s0, spec.max_steer, spec, 0.02);
  const State b = step(s0, 30.0 * M_PI / 180.0, spec, 0.02);
  CHECK(a.position == b.position);
  CHECK(a.velocity == b.velocity);
}

TEST_CASE("step rejects non-finite inputs") {
  const VehicleSpec spec;
  State s0 = state_at({0.0, 0.0}, 0.0);
  s0.position.x() = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(step(s0, 0.0, spec, 0.02), std::invalid_argument);
}

TEST_CASE("collision test against scenario obstacles") {
  const VehicleSpec spec;
  const Scenario scenario = build_scenario(straight_with_cone());
  const double lane = scenario.road.right_lane_center();

  SUBCASE("ten meters short of the cone is clear") {
    const State s = state_at(road_point(scenario.road, 140.0, lane), 0.0);
    CHECK_FALSE(in_collision(s, spec, scenario, 0.0));
  }
  SUBCASE("barely touching footprints collide") {
    // Place the vehicle so its front edge penetrates the disc by 1 cm.
    const Obstacle& ob = scenario.obstacles[0];
    const double front_to_rear_axle = spec.length - spec.rear_axle_to_rear;
    const double x_touch = ob.position0.x() - ob.radius - front_to_rear_axle;
    CHECK(in_collision(state_at({x_touch + 0.01, ob.position0.y()}, 0.0), spec, scenario, 0.0));
    CHECK_FALSE(in_collision(state_at({x_touch - 0.01, ob.position0.y()}, 0.0), spec, scenario, 0.0));
  }
  SUBCASE("co-located scripted adversary collides at its scheduled time") {
    ScenarioSpec spec2;
    spec2.kind = RoadKind::OpenGround;
    spec2.length = 1000.0;
    spec2.target = Vec2{900.0, 500.0};
    ScenarioSpec::ObstacleSpec adv;
    adv.shape = ObstacleShape::Box;
    adv.half_extents = {2.25, 1.25};
    adv.position = {120.0, 500.0};
    adv.velocity = {-20.0, 0.0};
    adv.scripted = true;
    spec2.obstacles.push_back(adv);
    const Scenario open = build_scenario(spec2);
    const State av = state_at({100.0, 500.0}, 0.0);
    CHECK_FALSE(in_collision(av, spec, open, 0.0));
    CHECK(in_collision(av, spec, open, 1.0));  // adversary reaches x=100 at t=1
  }
}

TEST_CASE("collision monotonicity under obstacle shrinking") {
  const VehicleSpec spec;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(148.0, 152.0);
  std::uniform_real_distribution<double> lat(-3.0, 3.0);
  std::uniform_real_distribution<double> ang(-0.5, 0.5);
  for (int i = 0; i < 200; ++i) {
    ScenarioSpec big_spec = straight_with_cone();
    big_spec.obstacles[0].radius = 0.6;
    ScenarioSpec small_spec = straight_with_cone();
    small_spec.obstacles[0].radius = 0.3;
    const Scenario big = build_scenario(big_spec);
    const Scenario small = build_scenario(small_spec);
    const State s = state_at({pos(rng), lat(rng)}, ang(rng));
    if (in_collision(s, spec, small, 0.0)) CHECK(in_collision(s, spec, big, 0.0));
  }
}

TEST_CASE("pure pursuit holds the lane on an empty straight road") {
  const VehicleSpec spec;
  ScenarioSpec sp;
  sp.kind = RoadKind::Straight;
  sp.start_lateral = 0.15;  // slight initial error to recover from
  const Scenario scenario = build_scenario(sp);
  const auto controller = reference_controller(scenario, spec);

  const RolloutResult r = rollout(scenario, spec, controller, 1200);
  CHECK(r.outcome.kind == OutcomeKind::Clean);
  const double lane = scenario.road.right_lane_center();
  double worst = 0.0;
  for (const State& s : r.trajectory.states) {
    worst = std::max(worst,
                     std::abs(signed_lateral_offset(scenario.road, s.position) - lane));
  }
  CHECK(worst < 0.2);
}

TEST_CASE("pure pursuit tracks the curved road") {
  const VehicleSpec spec;
  ScenarioSpec sp;
  sp.kind = RoadKind::Curved;
  const Scenario scenario = build_scenario(sp);
  const auto controller = reference_controller(scenario, spec);

  const int horizon = static_cast<int>(scenario.road.total_length() / (20.0 * 0.02)) - 40;
  const RolloutResult r = rollout(scenario, spec, controller, horizon);
  CHECK(r.outcome.kind == OutcomeKind::Clean);
  const double lane = scenario.road.right_lane_center();
  double worst = 0.0;
  for (const State& s : r.trajectory.states) {
    worst = std::max(worst,
                     std::abs(signed_lateral_offset(scenario.road, s.position) - lane));
  }
  CHECK(worst < 0.5);
}

TEST_CASE("zero steer departs the curved road") {
  const VehicleSpec spec;
  ScenarioSpec sp;
  sp.kind = RoadKind::Curved;
  const Scenario scenario = build_scenario(sp);
  const RolloutResult r =
      rollout(scenario, spec, [](const State&, std::size_t) { return 0.0; }, 2000);
  CHECK(r.outcome.kind == OutcomeKind::RoadDeparture);
}

TEST_CASE("no-avoidance controller hits the in-lane obstacle") {
  const VehicleSpec spec;
  const Scenario scenario = build_scenario(straight_with_cone());
  const auto controller = reference_controller(scenario, spec);
  const RolloutResult r = rollout(scenario, spec, controller, 1200);
  CHECK(r.outcome.kind == OutcomeKind::Collision);
}

TEST_CASE("rollout is deterministic and holds speed exactly") {
  const VehicleSpec spec;
  const Scenario scenario = build_scenario(straight_with_cone());
  const auto controller = reference_controller(scenario, spec);

  const RolloutResult a = rollout(scenario, spec, controller, 600);
  const RolloutResult b = rollout(scenario, spec, controller, 600);
  REQUIRE(a.trajectory.states.size() == b.trajectory.states.size());
  for (std::size_t i = 0; i < a.trajectory.states.size(); ++i) {
    CHECK(a.trajectory.states[i].position == b.trajectory.states[i].position);
    CHECK(a.trajectory.states[i].velocity == b.trajectory.states[i].velocity);
    if (i > 0) CHECK(a.trajectory.states[i].speed() == doctest::Approx(20.0).epsilon(1e-12));
  }
}

TEST_CASE("rollout rejects nonpositive horizons") {
  const VehicleSpec spec;
  const Scenario scenario = build_scenario(straight_with_cone());
  CHECK_THROWS_AS(rollout(scenario, spec, [](const State&, std::size_t) { return 0.0; }, 0),
                  std::invalid_argument);
}
