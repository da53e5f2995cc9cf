#include "skytest/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace skytest {

namespace {

double clamp_abs(double v, double lim) { return std::clamp(v, -lim, lim); }

}  // namespace

void step_wind(WindState& wind, SeededRng& rng, double dt) {
    double decay = std::exp(-dt / wind.gust_tau);
    // Exact discretization of the OU process: stationary variance is
    // gust_sigma^2 regardless of dt.
    double excite = wind.gust_sigma * std::sqrt(1.0 - decay * decay);
    double gx = rng.next_gaussian(0.0, 1.0);
    double gy = rng.next_gaussian(0.0, 1.0);
    double gz = rng.next_gaussian(0.0, 1.0);
    wind.gust.x = wind.gust.x * decay + excite * gx;
    wind.gust.y = wind.gust.y * decay + excite * gy;
    wind.gust.z = wind.gust.z * decay + excite * gz;
}

RigidState step_dynamics(const RigidState& state, const VelocityCommand& cmd,
                         const DroneParams& params, const WindState& wind,
                         double dt) {
    // Horizontal limit applies to the planar speed, not each axis, so that
    // saturation preserves the commanded direction.
    Vec3 v_cmd{cmd.vx, cmd.vy, clamp_abs(cmd.vz, params.vz_max)};
    double h = std::hypot(v_cmd.x, v_cmd.y);
    if (h > params.v_max) {
        double s = params.v_max / h;
        v_cmd.x *= s;
        v_cmd.y *= s;
    }
    Vec3 w = (wind.mean + wind.gust) * params.wind_coupling;
    Vec3 target = v_cmd + w;

    RigidState next = state;
    double a = dt / params.tau;
    next.velocity = state.velocity + (target - state.velocity) * a;
    next.position = state.position + next.velocity * dt;
    next.yaw = wrap_angle(state.yaw + clamp_abs(cmd.yaw_rate, params.yaw_rate_max) * dt);
    next.time = state.time + dt;
    return next;
}

CollisionReport check_collision(const RigidState& state, const WorldModel& world,
                                const DroneParams& params) {
    for (std::size_t i = 0; i < world.obstacles.size(); ++i) {
        if (shape_distance(world.obstacles[i].shape, state.position) <= params.body_radius) {
            return {ContactKind::Obstacle, static_cast<int>(i)};
        }
    }
    if (state.position.z <= 0.0) {
        return {state.velocity.norm() > params.touchdown_speed ? ContactKind::GroundCrash
                                                               : ContactKind::Touchdown,
                -1};
    }
    return {};
}

}  // namespace skytest
