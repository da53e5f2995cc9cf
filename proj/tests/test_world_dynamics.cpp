#include <doctest.h>

#include <cmath>

#include "skytest/dynamics.hpp"
#include "skytest/world.hpp"

using namespace skytest;

TEST_CASE("shape aabb") {
    Aabb ba = shape_aabb(BoxShape{{-1, 0, 0}, {2, 3, 4}});
    CHECK(ba.min == Vec3{-1, 0, 0});
    CHECK(ba.max == Vec3{2, 3, 4});
    Aabb ca = shape_aabb(CylinderShape{1.0, -2.0, 0.5, 3.0});
    CHECK(ca.min == Vec3{0.5, -2.5, 0.0});
    CHECK(ca.max == Vec3{1.5, -1.5, 3.0});
}

TEST_CASE("containment is boundary-inclusive") {
    BoxShape box{{0, 0, 0}, {1, 1, 1}};
    CHECK(shape_contains(box, {0.0, 0.5, 0.5}));
    CHECK(shape_contains(box, {1.0, 1.0, 1.0}));
    CHECK(!shape_contains(box, {1.0001, 0.5, 0.5}));
    CylinderShape cyl{0, 0, 1.0, 2.0};
    CHECK(shape_contains(cyl, {1.0, 0.0, 2.0}));
    CHECK(!shape_contains(cyl, {1.0, 0.1, 1.0}));
    CHECK(!shape_contains(cyl, {0.0, 0.0, 2.01}));
}

TEST_CASE("box distance cases") {
    BoxShape box{{0, 0, 0}, {2, 2, 2}};
    CHECK(shape_distance(box, {1, 1, 1}) == 0.0);            // inside
    CHECK(shape_distance(box, {3, 1, 1}) == doctest::Approx(1.0));  // face
    CHECK(shape_distance(box, {3, 3, 1}) == doctest::Approx(std::sqrt(2.0)));  // edge
    CHECK(shape_distance(box, {3, 3, 3}) == doctest::Approx(std::sqrt(3.0)));  // corner
}

TEST_CASE("cylinder distance cases") {
    CylinderShape cyl{0, 0, 1.0, 2.0};
    CHECK(shape_distance(cyl, {0.5, 0, 1}) == 0.0);
    CHECK(shape_distance(cyl, {2.0, 0, 1}) == doctest::Approx(1.0));   // radial
    CHECK(shape_distance(cyl, {0, 0, 3.0}) == doctest::Approx(1.0));   // above cap
    CHECK(shape_distance(cyl, {2.0, 0, 3.0}) ==
          doctest::Approx(std::sqrt(2.0)));                           // rim
    CHECK(shape_distance(cyl, {0.5, 0, -0.5}) == doctest::Approx(0.5));
}

// contains and distance must tell the same story on random probes
TEST_CASE("distance agrees with containment") {
    SeededRng rng(31);
    Shape shapes[] = {Shape{BoxShape{{-1, -2, 0}, {1.5, 0.5, 2.0}}},
                      Shape{CylinderShape{0.5, -0.5, 0.8, 1.7}}};
    for (const Shape& s : shapes) {
        for (int i = 0; i < 2000; ++i) {
            Vec3 p{rng.next_uniform() * 6 - 3, rng.next_uniform() * 6 - 3,
                   rng.next_uniform() * 4 - 1};
            if (shape_contains(s, p)) {
                CHECK(shape_distance(s, p) == 0.0);
            } else {
                CHECK(shape_distance(s, p) > 0.0);
            }
        }
    }
}

TEST_CASE("hover is an equilibrium") {
    RigidState s;
    s.position = {1, 2, 3};
    DroneParams params;
    WindState wind;
    RigidState n = step_dynamics(s, {}, params, wind, 0.01);
    CHECK(n.position == s.position);
    CHECK(n.velocity == Vec3{});
    CHECK(n.time == doctest::Approx(0.01));
}

// The update is the spec's explicit-Euler relaxation v' = v + (dt/tau)(c - v),
// whose 40-step value is (1 - (1-dt/tau)^40); the continuous limit 1-1/e is
// approached within 5e-3 at this step size.
TEST_CASE("velocity relaxation follows the first-order lag") {
    RigidState s;
    DroneParams params;  // tau 0.4
    WindState wind;
    VelocityCommand cmd{1.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < 40; ++i) s = step_dynamics(s, cmd, params, wind, 0.01);
    double a = 0.01 / params.tau;
    double exact_discrete = 1.0 - std::pow(1.0 - a, 40);
    CHECK(s.velocity.x == doctest::Approx(exact_discrete).epsilon(1e-12));
    CHECK(s.velocity.x == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(8e-3));
    CHECK(s.time == doctest::Approx(0.4));
}

TEST_CASE("position integration is semi-implicit") {
    RigidState s;
    DroneParams params;
    WindState wind;
    VelocityCommand cmd{1.0, 0.0, 0.0, 0.0};
    RigidState n = step_dynamics(s, cmd, params, wind, 0.01);
    // position moves by the UPDATED velocity, not the stale zero
    CHECK(n.position.x == doctest::Approx(n.velocity.x * 0.01));
    CHECK(n.position.x > 0.0);
}

TEST_CASE("horizontal clamp preserves the commanded direction") {
    RigidState s;
    DroneParams params;  // v_max 2
    WindState wind;
    VelocityCommand cmd{3.0, 4.0, 0.0, 0.0};
    for (int i = 0; i < 4000; ++i) s = step_dynamics(s, cmd, params, wind, 0.01);
    // steady state is the clamped command: 2 * (3,4)/5
    CHECK(s.velocity.x == doctest::Approx(1.2).epsilon(1e-6));
    CHECK(s.velocity.y == doctest::Approx(1.6).epsilon(1e-6));
    CHECK(s.velocity.norm_xy() == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("horizontal speed never exceeds v_max without wind") {
    RigidState s;
    DroneParams params;
    WindState wind;
    SeededRng rng(77);
    for (int i = 0; i < 5000; ++i) {
        VelocityCommand cmd{rng.next_uniform() * 20 - 10, rng.next_uniform() * 20 - 10,
                            rng.next_uniform() * 4 - 2, 0.0};
        s = step_dynamics(s, cmd, params, wind, 0.01);
        CHECK(s.velocity.norm_xy() <= params.v_max + 1e-9);
        CHECK(std::abs(s.velocity.z) <= params.vz_max + 1e-9);
    }
}

TEST_CASE("commands inside the limits pass through unclamped") {
    RigidState s;
    DroneParams params;
    WindState wind;
    VelocityCommand cmd{0.3, -0.4, 0.2, 0.0};
    for (int i = 0; i < 4000; ++i) s = step_dynamics(s, cmd, params, wind, 0.01);
    CHECK(s.velocity.x == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(s.velocity.y == doctest::Approx(-0.4).epsilon(1e-6));
    CHECK(s.velocity.z == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("yaw rate clamps and wraps") {
    RigidState s;
    DroneParams params;  // yaw_rate_max 1
    WindState wind;
    VelocityCommand cmd{0, 0, 0, 5.0};
    RigidState n = step_dynamics(s, cmd, params, wind, 0.01);
    CHECK(n.yaw == doctest::Approx(0.01));  // clamped to 1 rad/s
    s.yaw = kPi - 0.005;
    n = step_dynamics(s, cmd, params, wind, 0.01);
    CHECK(n.yaw <= kPi);  // wrapped
}

TEST_CASE("wind leaks through the coupling fraction") {
    RigidState s;
    DroneParams params;
    WindState wind;
    wind.mean = {1.5, 0.0, 0.0};
    for (int i = 0; i < 8000; ++i) s = step_dynamics(s, {}, params, wind, 0.01);
    CHECK(s.velocity.x == doctest::Approx(1.5 * params.wind_coupling).epsilon(1e-6));
}

TEST_CASE("noiseless gust decays geometrically") {
    WindState wind;
    wind.gust = {1.0, -0.5, 0.25};
    wind.gust_sigma = 0.0;
    wind.gust_tau = 2.0;
    SeededRng rng(5);
    double decay = std::exp(-0.01 / 2.0);
    WindState prev = wind;
    for (int i = 0; i < 50; ++i) {
        step_wind(wind, rng, 0.01);
        CHECK(wind.gust.x == doctest::Approx(prev.gust.x * decay).epsilon(1e-12));
        CHECK(wind.gust.y == doctest::Approx(prev.gust.y * decay).epsilon(1e-12));
        prev = wind;
    }
    CHECK(std::abs(wind.gust.x) < 1.0);
}

TEST_CASE("gust stationary spread tracks gust_sigma") {
    WindState wind;
    wind.gust_sigma = 0.8;
    wind.gust_tau = 2.0;
    SeededRng rng(17);
    double sq = 0.0;
    int n = 0;
    for (int i = 0; i < 60000; ++i) {
        step_wind(wind, rng, 0.01);
        if (i > 5000) {  // burn-in
            sq += wind.gust.x * wind.gust.x;
            ++n;
        }
    }
    CHECK(std::sqrt(sq / n) == doctest::Approx(0.8).epsilon(0.06));
}

TEST_CASE("wind stepping consumes three gaussians per call") {
    WindState wind;
    wind.gust_sigma = 0.5;
    SeededRng a(21), b(21);
    step_wind(wind, a, 0.01);
    for (int i = 0; i < 6; ++i) (void)b.next_u64();
    CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("collision against the expanded obstacle boundary") {
    WorldModel world;
    world.obstacles.push_back({BoxShape{{2, 2, 0}, {3, 3, 2.5}}, false});
    DroneParams params;  // body radius 0.3
    RigidState s;
    s.position = {2.5, 2.5, 1.0};
    CHECK(check_collision(s, world, params).kind == ContactKind::Obstacle);
    CHECK(check_collision(s, world, params).obstacle_index == 0);
    s.position = {1.75, 2.5, 1.0};  // 0.25 from the face, inside the margin
    CHECK(check_collision(s, world, params).kind == ContactKind::Obstacle);
    s.position = {1.65, 2.5, 1.0};  // 0.35 away, clear
    CHECK(check_collision(s, world, params).kind == ContactKind::None);
    s.position = {0, 0, 5};
    CHECK(check_collision(s, world, params).kind == ContactKind::None);
}

TEST_CASE("ground contact classifies by impact speed") {
    WorldModel world;
    DroneParams params;  // touchdown_speed 0.5
    RigidState s;
    s.position = {0, 0, -0.001};
    s.velocity = {0, 0, -0.1};
    CHECK(check_collision(s, world, params).kind == ContactKind::Touchdown);
    s.velocity = {0.45, 0, -0.45};  // norm 0.64 > 0.5
    CHECK(check_collision(s, world, params).kind == ContactKind::GroundCrash);
    s.position = {0, 0, 0.001};
    CHECK(check_collision(s, world, params).kind == ContactKind::None);
}

TEST_CASE("first matching obstacle wins") {
    WorldModel world;
    world.obstacles.push_back({CylinderShape{0, 0, 1.0, 3.0}, false});
    world.obstacles.push_back({BoxShape{{-1, -1, 0}, {1, 1, 3}}, false});
    DroneParams params;
    RigidState s;
    s.position = {0, 0, 1};
    CHECK(check_collision(s, world, params).obstacle_index == 0);
}
