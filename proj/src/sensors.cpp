#include "skytest/sensors.hpp"

#include <algorithm>
#include <cmath>

namespace skytest {

namespace {

constexpr double kMinDepth = 0.01;

}  // namespace

Vec2 distort_normalized(const Vec2& n, const std::array<double, 5>& d) {
    if (d == std::array<double, 5>{0.0, 0.0, 0.0, 0.0, 0.0}) return n;
    double r2 = n.x * n.x + n.y * n.y;
    double radial = 1.0 + d[0] * r2 + d[1] * r2 * r2 + d[4] * r2 * r2 * r2;
    double xd = n.x * radial + 2.0 * d[2] * n.x * n.y + d[3] * (r2 + 2.0 * n.x * n.x);
    double yd = n.y * radial + d[2] * (r2 + 2.0 * n.y * n.y) + 2.0 * d[3] * n.x * n.y;
    return {xd, yd};
}

Vec2 undistort_normalized(const Vec2& obs, const std::array<double, 5>& d) {
    if (d == std::array<double, 5>{0.0, 0.0, 0.0, 0.0, 0.0}) return obs;
    Vec2 n = obs;
    // Fixed-point iteration; the contraction is slow near the image rim with
    // strong coefficients, so run to convergence rather than a token count.
    for (int it = 0; it < 40; ++it) {
        Vec2 fwd = distort_normalized(n, d);
        Vec2 next{n.x + (obs.x - fwd.x), n.y + (obs.y - fwd.y)};
        double dx = next.x - n.x, dy = next.y - n.y;
        n = next;
        if (dx * dx + dy * dy < 1e-28) break;
    }
    return n;
}

std::array<Vec3, 4> marker_corners_world(const MarkerSpec& marker) {
    double h = 0.5 * marker.side;
    std::array<Vec3, 4> local{Vec3{-h, h, 0.0}, Vec3{h, h, 0.0},
                              Vec3{h, -h, 0.0}, Vec3{-h, -h, 0.0}};
    std::array<Vec3, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = marker.pose.transform(local[i]);
    return out;
}

Quat camera_mount_rotation() {
    return Quat::from_axis_angle({1.0, 0.0, 0.0}, kPi);
}

Pose3 camera_pose_world(const Vec3& drone_position, double drone_yaw) {
    return {drone_position, (Quat::from_yaw(drone_yaw) * camera_mount_rotation()).normalized()};
}

std::optional<std::array<Vec2, 4>> project_marker(const Pose3& cam_pose,
                                                  const CameraIntrinsics& intr,
                                                  const MarkerSpec& marker) {
    Pose3 world_to_cam = cam_pose.inverse();
    std::array<Vec2, 4> px;
    auto corners = marker_corners_world(marker);
    for (int i = 0; i < 4; ++i) {
        Vec3 pc = world_to_cam.transform(corners[i]);
        if (pc.z < kMinDepth) return std::nullopt;
        Vec2 n = distort_normalized({pc.x / pc.z, pc.y / pc.z}, intr.dist);
        px[i] = {intr.fx * n.x + intr.cx, intr.fy * n.y + intr.cy};
        if (px[i].x < 0.0 || px[i].x > intr.width || px[i].y < 0.0 ||
            px[i].y > intr.height) {
            return std::nullopt;
        }
    }
    return px;
}

double quad_area(const std::array<Vec2, 4>& c) {
    double a = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Vec2& p = c[i];
        const Vec2& q = c[(i + 1) % 4];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * std::abs(a);
}

namespace {

bool passes_gates(const Pose3& cam_pose, const CameraIntrinsics& intr,
                  const MarkerSpec& marker, double occlusion,
                  const DetectorParams& params,
                  std::optional<std::array<Vec2, 4>>* corners_out) {
    auto corners = project_marker(cam_pose, intr, marker);
    if (!corners) return false;
    if (std::sqrt(quad_area(*corners)) < params.min_side_px) return false;

    Vec3 normal = marker.pose.orientation.rotate({0.0, 0.0, 1.0});
    Vec3 to_cam = (cam_pose.position - marker.pose.position).normalized();
    double cos_view = normal.dot(to_cam);
    double max_cos = std::cos(params.max_view_angle_deg * kPi / 180.0);
    if (cos_view < max_cos) return false;

    if (occlusion >= params.occlusion_cutoff) return false;

    if (corners_out) *corners_out = corners;
    return true;
}

}  // namespace

bool nominally_visible(const Pose3& cam_pose, const CameraIntrinsics& intr,
                       const MarkerSpec& marker, double occlusion,
                       const DetectorParams& params) {
    return passes_gates(cam_pose, intr, marker, occlusion, params, nullptr);
}

std::optional<MarkerObservation> detect_marker(const Pose3& cam_pose,
                                               const CameraIntrinsics& intr,
                                               const MarkerSpec& marker,
                                               double occlusion, double lighting,
                                               const DetectorParams& params,
                                               double now, SeededRng& rng) {
    std::optional<std::array<Vec2, 4>> corners;
    if (!passes_gates(cam_pose, intr, marker, occlusion, params, &corners)) {
        return std::nullopt;
    }
    double p_miss = std::clamp(1.0 - lighting, 0.0, 1.0) * 0.9;
    if (rng.next_uniform() < p_miss) return std::nullopt;

    MarkerObservation obs;
    obs.id = marker.id;
    obs.t = now;
    for (int i = 0; i < 4; ++i) {
        double nx = rng.next_gaussian(0.0, params.pixel_sigma);
        double ny = rng.next_gaussian(0.0, params.pixel_sigma);
        obs.corners[i] = {(*corners)[i].x + nx, (*corners)[i].y + ny};
    }
    return obs;
}

std::optional<Vec3> gps_read(const Vec3& true_pos, const GpsParams& params,
                             double effective_drift, GpsBiasState& bias,
                             double now, bool available, SeededRng& rng) {
    if (!available) return std::nullopt;
    if (bias.has_last) {
        double gap = std::max(0.0, now - bias.last_time);
        double s = effective_drift * std::sqrt(gap);
        bias.bias.x += rng.next_gaussian(0.0, s);
        bias.bias.y += rng.next_gaussian(0.0, s);
        bias.bias.z += rng.next_gaussian(0.0, s);
    } else {
        // First fix defines the walk origin; draws are consumed anyway to
        // keep the stream position fix-count based.
        rng.next_gaussian(0.0, 0.0);
        rng.next_gaussian(0.0, 0.0);
        rng.next_gaussian(0.0, 0.0);
        bias.has_last = true;
    }
    bias.last_time = now;
    return Vec3{true_pos.x + bias.bias.x + rng.next_gaussian(0.0, params.sigma_xy),
                true_pos.y + bias.bias.y + rng.next_gaussian(0.0, params.sigma_xy),
                true_pos.z + bias.bias.z + rng.next_gaussian(0.0, params.sigma_z)};
}

double range_read(const Vec3& true_pos, const WorldModel& world, double sigma,
                  SeededRng& rng) {
    double surface = 0.0;
    for (const auto& obs : world.obstacles) {
        double top;
        bool under;
        if (const auto* b = std::get_if<BoxShape>(&obs.shape)) {
            under = true_pos.x >= b->min.x && true_pos.x <= b->max.x &&
                    true_pos.y >= b->min.y && true_pos.y <= b->max.y;
            top = b->max.z;
        } else {
            const auto& c = std::get<CylinderShape>(obs.shape);
            under = std::hypot(true_pos.x - c.cx, true_pos.y - c.cy) <= c.radius;
            top = c.height;
        }
        if (under && top <= true_pos.z) surface = std::max(surface, top);
    }
    double r = true_pos.z - surface + rng.next_gaussian(0.0, sigma);
    return std::max(0.0, r);
}

}  // namespace skytest
