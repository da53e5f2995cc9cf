#pragma once

#include <array>
#include <optional>

#include "skytest/geom.hpp"
#include "skytest/world.hpp"

namespace skytest {

struct CameraIntrinsics {
    double fx = 640.0;
    double fy = 480.0;
    double cx = 320.0;
    double cy = 240.0;
    int width = 640;
    int height = 480;
    // Radial/tangential: k1, k2, p1, p2, k3. Zero by default.
    std::array<double, 5> dist{0.0, 0.0, 0.0, 0.0, 0.0};
    bool operator==(const CameraIntrinsics&) const = default;
};

// Square fiducial, corners ordered TL, TR, BR, BL in the marker frame
// (x right, y up, z out of the plane).
struct MarkerSpec {
    int id = 0;
    Pose3 pose;          // marker frame in world; flat markers face +z up
    double yaw = 0.0;    // as declared; pose.orientation is derived from it
    double side = 0.15;  // edge length, m
    bool operator==(const MarkerSpec&) const = default;
};

inline MarkerSpec make_marker(int id, const Vec3& pos, double yaw, double side) {
    return {id, {pos, Quat::from_yaw(yaw)}, yaw, side};
}

std::array<Vec3, 4> marker_corners_world(const MarkerSpec& marker);

// Forward lens model on normalized image coordinates, and its iterative
// inverse. Identity when all coefficients are zero.
Vec2 distort_normalized(const Vec2& n, const std::array<double, 5>& dist);
Vec2 undistort_normalized(const Vec2& d, const std::array<double, 5>& dist);

// Camera frame in the body: +x right, +z along the optical axis. The mount
// points the camera straight down, so at yaw 0 image +x is world +x and
// image +y is world -y.
Quat camera_mount_rotation();
Pose3 camera_pose_world(const Vec3& drone_position, double drone_yaw);

struct MarkerObservation {
    int id = 0;
    std::array<Vec2, 4> corners{};
    double t = 0.0;
};

struct DetectorParams {
    double min_side_px = 12.0;        // sqrt of projected quad area
    double max_view_angle_deg = 65.0;
    double occlusion_cutoff = 0.5;    // at or above: no detection
    double pixel_sigma = 0.5;         // corner noise, px
    bool operator==(const DetectorParams&) const = default;
};

// Pinhole projection of all four corners; nullopt when any corner is behind
// the camera or outside the image. Distortion applied when coefficients are
// nonzero.
std::optional<std::array<Vec2, 4>> project_marker(const Pose3& cam_pose,
                                                  const CameraIntrinsics& intr,
                                                  const MarkerSpec& marker);

double quad_area(const std::array<Vec2, 4>& corners);

// Deterministic visibility gates (projection, apparent size, view angle,
// occlusion). This is the detection-availability denominator.
bool nominally_visible(const Pose3& cam_pose, const CameraIntrinsics& intr,
                       const MarkerSpec& marker, double occlusion,
                       const DetectorParams& params);

// Full detector: gates, then a lighting miss draw with
// p_miss = clamp(1 - lighting, 0, 1) * 0.9, then corner noise.
// Draw order per detection: one uniform, then x/y gaussians per corner.
std::optional<MarkerObservation> detect_marker(const Pose3& cam_pose,
                                               const CameraIntrinsics& intr,
                                               const MarkerSpec& marker,
                                               double occlusion, double lighting,
                                               const DetectorParams& params,
                                               double now, SeededRng& rng);

struct GpsParams {
    double sigma_xy = 0.02;
    double sigma_z = 0.04;
    double drift_rate = 0.0;  // bias random walk, m per sqrt(s)
    bool operator==(const GpsParams&) const = default;
};

// Bias walk advances only when a fix is produced; dropout gaps widen the
// next step instead.
struct GpsBiasState {
    Vec3 bias;
    double last_time = 0.0;
    bool has_last = false;
};

// Six gaussians per fix (three bias, three noise), always consumed, so the
// stream position depends only on the number of fixes delivered.
std::optional<Vec3> gps_read(const Vec3& true_pos, const GpsParams& params,
                             double effective_drift, GpsBiasState& bias,
                             double now, bool available, SeededRng& rng);

// Downward range: height above the highest obstacle top (or ground) under
// the current xy. Obstacle undersides are not modeled. Clamped at zero.
double range_read(const Vec3& true_pos, const WorldModel& world, double sigma,
                  SeededRng& rng);

}  // namespace skytest
