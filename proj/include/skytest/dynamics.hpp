#pragma once

#include "skytest/geom.hpp"
#include "skytest/world.hpp"

namespace skytest {

struct RigidState {
    Vec3 position;
    Vec3 velocity;
    double yaw = 0.0;
    double time = 0.0;
};

struct DroneParams {
    double tau = 0.4;            // velocity tracking time constant, s
    double v_max = 2.0;          // horizontal speed limit, m/s
    double vz_max = 1.0;         // vertical speed limit, m/s
    double yaw_rate_max = 1.0;   // rad/s
    double body_radius = 0.3;    // collision sphere, m
    // Fraction of ambient wind the inner velocity loop fails to reject.
    double wind_coupling = 0.10;
    // |v| at ground contact separating touchdown from crash, m/s.
    double touchdown_speed = 0.5;
    bool operator==(const DroneParams&) const = default;
};

struct WindState {
    Vec3 mean;
    Vec3 gust;               // Ornstein-Uhlenbeck state
    double gust_sigma = 0.0; // stationary std per axis, m/s
    double gust_tau = 2.0;   // gust correlation time, s
};

struct VelocityCommand {
    double vx = 0.0;
    double vy = 0.0;
    double vz = 0.0;
    double yaw_rate = 0.0;
};

// Draw order per step is frozen: gust x, y, z (one gaussian each), then the
// state update. Changing it breaks bit-exact replay.
void step_wind(WindState& wind, SeededRng& rng, double dt);

// First-order velocity tracking, semi-implicit position update. The command
// is clamped before tracking: horizontal speed to v_max (direction
// preserved), vertical to vz_max, yaw rate to yaw_rate_max.
RigidState step_dynamics(const RigidState& state, const VelocityCommand& cmd,
                         const DroneParams& params, const WindState& wind,
                         double dt);

enum class ContactKind { None, Obstacle, Touchdown, GroundCrash };

struct CollisionReport {
    ContactKind kind = ContactKind::None;
    int obstacle_index = -1;
};

// First obstacle whose body_radius-expanded boundary contains the position,
// else ground contact (z <= 0) classified by impact speed.
CollisionReport check_collision(const RigidState& state, const WorldModel& world,
                                const DroneParams& params);

}  // namespace skytest
