#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "skytest/sensors.hpp"

using namespace skytest;

namespace {

// Independent pinhole forward model, written out as explicit trigonometry so
// it shares no code with the library path (no Quat, no Pose3). Body yaw about
// +z, then a straight-down mount: camera x = body x, y = -body y, z = -body z.
std::optional<std::array<Vec2, 4>> oracle_project(const Vec3& drone, double yaw,
                                                  const CameraIntrinsics& intr,
                                                  const Vec3& marker_pos,
                                                  double marker_yaw,
                                                  double side) {
    double h = 0.5 * side;
    double mc = std::cos(marker_yaw), ms = std::sin(marker_yaw);
    // TL, TR, BR, BL in the marker frame (x right, y up).
    double local[4][2] = {{-h, h}, {h, h}, {h, -h}, {-h, -h}};
    std::array<Vec2, 4> px;
    double c = std::cos(yaw), s = std::sin(yaw);
    for (int i = 0; i < 4; ++i) {
        double wx = marker_pos.x + mc * local[i][0] - ms * local[i][1];
        double wy = marker_pos.y + ms * local[i][0] + mc * local[i][1];
        double wz = marker_pos.z;
        // World offset into body axes (inverse yaw), then the mount flip.
        double rx = wx - drone.x, ry = wy - drone.y, rz = wz - drone.z;
        double bx = c * rx + s * ry;
        double by = -s * rx + c * ry;
        double camx = bx, camy = -by, camz = -(rz);
        if (camz < 0.01) return std::nullopt;
        double u = intr.fx * camx / camz + intr.cx;
        double v = intr.fy * camy / camz + intr.cy;
        if (u < 0.0 || u > intr.width || v < 0.0 || v > intr.height) {
            return std::nullopt;
        }
        px[i] = {u, v};
    }
    return px;
}

}  // namespace

TEST_CASE("camera mount points straight down") {
    Quat m = camera_mount_rotation();
    Vec3 axis = m.rotate({0.0, 0.0, 1.0});
    CHECK(axis.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(axis.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(axis.z == doctest::Approx(-1.0).epsilon(1e-12));

    Vec3 right = m.rotate({1.0, 0.0, 0.0});
    CHECK(right.x == doctest::Approx(1.0).epsilon(1e-12));
    Vec3 up = m.rotate({0.0, 1.0, 0.0});
    CHECK(up.y == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("camera pose maps world points into the expected camera frame") {
    Pose3 cam = camera_pose_world({0.0, 0.0, 2.0}, 0.0);
    Vec3 pc = cam.inverse().transform({0.2, 0.3, 0.0});
    CHECK(pc.x == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(pc.y == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(pc.z == doctest::Approx(2.0).epsilon(1e-12));

    // With body yaw the image axes rotate along.
    Pose3 cam2 = camera_pose_world({1.0, 1.0, 1.5}, kPi / 2.0);
    Vec3 pc2 = cam2.inverse().transform({1.0, 1.4, 0.0});
    CHECK(pc2.x == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(pc2.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pc2.z == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("marker corners follow the TL,TR,BR,BL layout") {
    MarkerSpec m = make_marker(0, {1.0, 2.0, 0.0}, 0.0, 0.15);
    auto c = marker_corners_world(m);
    CHECK(c[0].x == doctest::Approx(1.0 - 0.075));
    CHECK(c[0].y == doctest::Approx(2.0 + 0.075));
    CHECK(c[1].x == doctest::Approx(1.0 + 0.075));
    CHECK(c[1].y == doctest::Approx(2.0 + 0.075));
    CHECK(c[2].x == doctest::Approx(1.0 + 0.075));
    CHECK(c[2].y == doctest::Approx(2.0 - 0.075));
    CHECK(c[3].x == doctest::Approx(1.0 - 0.075));
    CHECK(c[3].y == doctest::Approx(2.0 - 0.075));
    for (const auto& p : c) CHECK(p.z == doctest::Approx(0.0));

    // Yaw rotates the corner layout in the plane.
    MarkerSpec r = make_marker(0, {0.0, 0.0, 0.0}, kPi / 2.0, 0.15);
    auto cr = marker_corners_world(r);
    CHECK(cr[0].x == doctest::Approx(-0.075));
    CHECK(cr[0].y == doctest::Approx(-0.075));
    CHECK(cr[1].x == doctest::Approx(-0.075));
    CHECK(cr[1].y == doctest::Approx(0.075));
}

TEST_CASE("projection of the nominal hover view lands on the book values") {
    // Straight down from 1.5 m: fx*0.075/1.5 = 32 px, fy*0.075/1.5 = 24 px.
    CameraIntrinsics intr;
    MarkerSpec m = make_marker(0, {0.0, 0.0, 0.0}, 0.0, 0.15);
    auto px = project_marker(camera_pose_world({0.0, 0.0, 1.5}, 0.0), intr, m);
    REQUIRE(px.has_value());
    CHECK((*px)[0].x == doctest::Approx(288.0).epsilon(1e-10));  // TL
    CHECK((*px)[0].y == doctest::Approx(216.0).epsilon(1e-10));
    CHECK((*px)[1].x == doctest::Approx(352.0).epsilon(1e-10));  // TR
    CHECK((*px)[1].y == doctest::Approx(216.0).epsilon(1e-10));
    CHECK((*px)[2].x == doctest::Approx(352.0).epsilon(1e-10));  // BR
    CHECK((*px)[2].y == doctest::Approx(264.0).epsilon(1e-10));
    CHECK((*px)[3].x == doctest::Approx(288.0).epsilon(1e-10));  // BL
    CHECK((*px)[3].y == doctest::Approx(264.0).epsilon(1e-10));

    // Marker center on the optical axis: corner centroid is the principal
    // point exactly.
    double mu = ((*px)[0].x + (*px)[1].x + (*px)[2].x + (*px)[3].x) / 4.0;
    double mv = ((*px)[0].y + (*px)[1].y + (*px)[2].y + (*px)[3].y) / 4.0;
    CHECK(mu == doctest::Approx(320.0).epsilon(1e-12));
    CHECK(mv == doctest::Approx(240.0).epsilon(1e-12));
}

TEST_CASE("projection agrees with an independent forward model") {
    CameraIntrinsics intr;
    SeededRng rng(2024);
    int visible = 0, hidden = 0;
    for (int trial = 0; trial < 200; ++trial) {
        Vec3 mpos{rng.next_uniform() * 4.0 - 2.0, rng.next_uniform() * 4.0 - 2.0,
                  rng.next_uniform() * 0.5};
        double myaw = rng.next_uniform() * 2.0 * kPi - kPi;
        double z = mpos.z + 0.8 + rng.next_uniform() * 4.2;
        double spread = 0.6 * (z - mpos.z);
        Vec3 drone{mpos.x + (rng.next_uniform() * 2.0 - 1.0) * spread,
                   mpos.y + (rng.next_uniform() * 2.0 - 1.0) * spread, z};
        double yaw = rng.next_uniform() * 2.0 * kPi - kPi;

        MarkerSpec marker = make_marker(7, mpos, myaw, 0.15);
        auto lib = project_marker(camera_pose_world(drone, yaw), intr, marker);
        auto ref = oracle_project(drone, yaw, intr, mpos, myaw, 0.15);

        REQUIRE(lib.has_value() == ref.has_value());
        if (!lib) {
            ++hidden;
            continue;
        }
        ++visible;
        for (int i = 0; i < 4; ++i) {
            CHECK((*lib)[i].x == doctest::Approx((*ref)[i].x).epsilon(1e-9));
            CHECK((*lib)[i].y == doctest::Approx((*ref)[i].y).epsilon(1e-9));
        }
    }
    // The sample must exercise both outcomes to mean anything.
    CHECK(visible >= 50);
    CHECK(hidden >= 20);
}

TEST_CASE("projection rejects markers behind the camera or outside the frame") {
    CameraIntrinsics intr;
    // Marker plane above the UAV: every corner has negative depth.
    MarkerSpec high = make_marker(0, {0.0, 0.0, 2.0}, 0.0, 0.15);
    CHECK(!project_marker(camera_pose_world({0.0, 0.0, 0.5}, 0.0), intr, high));

    // Far off to the side while the camera looks straight down.
    MarkerSpec side = make_marker(0, {5.0, 0.0, 0.0}, 0.0, 0.15);
    CHECK(!project_marker(camera_pose_world({0.0, 0.0, 2.0}, 0.0), intr, side));
}

TEST_CASE("distortion model round-trips and is identity at zero") {
    std::array<double, 5> zero{0.0, 0.0, 0.0, 0.0, 0.0};
    Vec2 n{0.31, -0.22};
    Vec2 same = distort_normalized(n, zero);
    CHECK(same.x == n.x);
    CHECK(same.y == n.y);

    std::array<double, 5> d{-0.2, 0.05, 0.001, -0.002, 0.01};
    for (double x = -0.5; x <= 0.5; x += 0.125) {
        for (double y = -0.5; y <= 0.5; y += 0.125) {
            Vec2 fwd = distort_normalized({x, y}, d);
            Vec2 back = undistort_normalized(fwd, d);
            CHECK(back.x == doctest::Approx(x).epsilon(1e-9));
            CHECK(back.y == doctest::Approx(y).epsilon(1e-9));
        }
    }
}

TEST_CASE("quad area is the shoelace value, orientation independent") {
    std::array<Vec2, 4> unit{Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}, Vec2{0, 1}};
    CHECK(quad_area(unit) == doctest::Approx(1.0));

    std::array<Vec2, 4> rev{Vec2{0, 1}, Vec2{1, 1}, Vec2{1, 0}, Vec2{0, 0}};
    CHECK(quad_area(rev) == doctest::Approx(1.0));

    std::array<Vec2, 4> trap{Vec2{0, 0}, Vec2{2, 0}, Vec2{1, 1}, Vec2{0, 1}};
    CHECK(quad_area(trap) == doctest::Approx(1.5));

    std::array<Vec2, 4> line{Vec2{0, 0}, Vec2{1, 1}, Vec2{2, 2}, Vec2{3, 3}};
    CHECK(quad_area(line) == doctest::Approx(0.0));
}

TEST_CASE("apparent size gate trips where the pinhole arithmetic says") {
    CameraIntrinsics intr;
    DetectorParams params;
    MarkerSpec m = make_marker(0, {0.0, 0.0, 0.0}, 0.0, 0.15);
    // sqrt(fx*fy)*side/Z crosses 12 px at Z = 6.928 m.
    CHECK(nominally_visible(camera_pose_world({0.0, 0.0, 6.8}, 0.0), intr, m,
                            0.0, params));
    CHECK(!nominally_visible(camera_pose_world({0.0, 0.0, 7.05}, 0.0), intr, m,
                             0.0, params));
    // The high-altitude failure: 640*0.15/30 = 3.2 px apparent side.
    CHECK(!nominally_visible(camera_pose_world({0.0, 0.0, 30.0}, 0.0), intr, m,
                             0.0, params));
}

TEST_CASE("view angle gate uses the marker normal against the camera ray") {
    CameraIntrinsics intr;
    DetectorParams params;
    Pose3 cam = camera_pose_world({0.0, 0.0, 1.5}, 0.0);

    auto tilted = [](double tilt) {
        MarkerSpec m;
        m.id = 3;
        m.side = 0.15;
        m.pose = {{0.0, 0.0, 0.0}, Quat::from_axis_angle({1.0, 0.0, 0.0}, tilt)};
        return m;
    };
    CHECK(nominally_visible(cam, intr, tilted(60.0 * kPi / 180.0), 0.0, params));
    CHECK(!nominally_visible(cam, intr, tilted(70.0 * kPi / 180.0), 0.0, params));
}

TEST_CASE("occlusion gate cuts off at the configured fraction") {
    CameraIntrinsics intr;
    DetectorParams params;
    MarkerSpec m = make_marker(0, {0.0, 0.0, 0.0}, 0.0, 0.15);
    Pose3 cam = camera_pose_world({0.0, 0.0, 1.5}, 0.0);
    CHECK(nominally_visible(cam, intr, m, 0.49, params));
    CHECK(!nominally_visible(cam, intr, m, 0.5, params));
    CHECK(!nominally_visible(cam, intr, m, 1.0, params));
}

TEST_CASE("detector consumes one uniform then two gaussians per corner") {
    CameraIntrinsics intr;
    DetectorParams params;
    MarkerSpec m = make_marker(0, {0.0, 0.0, 0.0}, 0.0, 0.15);
    Pose3 cam = camera_pose_world({0.0, 0.0, 1.5}, 0.0);

    SeededRng rng(5), twin(5);
    auto obs = detect_marker(cam, intr, m, 0.0, 1.0, params, 0.25, rng);
    REQUIRE(obs.has_value());
    CHECK(obs->id == 0);
    CHECK(obs->t == 0.25);

    twin.next_uniform();
    for (int i = 0; i < 8; ++i) twin.next_gaussian(0.0, 1.0);
    CHECK(rng.next_u64() == twin.next_u64());
}

TEST_CASE("detector gate failure consumes no randomness") {
    CameraIntrinsics intr;
    DetectorParams params;
    MarkerSpec m = make_marker(0, {0.0, 0.0, 0.0}, 0.0, 0.15);
    Pose3 cam = camera_pose_world({0.0, 0.0, 1.5}, 0.0);

    SeededRng rng(9), twin(9);
    CHECK(!detect_marker(cam, intr, m, 0.8, 1.0, params, 0.0, rng));
    CHECK(rng.next_u64() == twin.next_u64());
}

TEST_CASE("noise-free detector returns the exact projection") {
    CameraIntrinsics intr;
    DetectorParams params;
    params.pixel_sigma = 0.0;
    MarkerSpec m = make_marker(4, {0.2, -0.1, 0.0}, 0.4, 0.15);
    Pose3 cam = camera_pose_world({0.1, 0.0, 1.2}, 0.1);

    SeededRng rng(11);
    auto obs = detect_marker(cam, intr, m, 0.0, 1.0, params, 1.0, rng);
    auto px = project_marker(cam, intr, m);
    REQUIRE(obs.has_value());
    REQUIRE(px.has_value());
    for (int i = 0; i < 4; ++i) {
        CHECK(obs->corners[i].x == (*px)[i].x);
        CHECK(obs->corners[i].y == (*px)[i].y);
    }
}

TEST_CASE("lighting miss rate tracks p_miss and a miss costs one draw") {
    CameraIntrinsics intr;
    DetectorParams params;
    MarkerSpec m = make_marker(0, {0.0, 0.0, 0.0}, 0.0, 0.15);
    Pose3 cam = camera_pose_world({0.0, 0.0, 1.5}, 0.0);

    // lighting 0 -> p_miss 0.9.
    SeededRng rng(31);
    int detections = 0;
    for (int i = 0; i < 2000; ++i) {
        if (detect_marker(cam, intr, m, 0.0, 0.0, params, 0.0, rng)) ++detections;
    }
    CHECK(detections > 140);
    CHECK(detections < 260);

    // Stream discipline on both branches: a miss consumes the uniform only.
    bool saw_miss = false, saw_hit = false;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SeededRng a(seed), b(seed);
        auto obs = detect_marker(cam, intr, m, 0.0, 0.0, params, 0.0, a);
        b.next_uniform();
        if (obs) {
            saw_hit = true;
            for (int i = 0; i < 8; ++i) b.next_gaussian(0.0, 1.0);
        } else {
            saw_miss = true;
        }
        CHECK(a.next_u64() == b.next_u64());
    }
    CHECK(saw_miss);
    CHECK(saw_hit);

    // Full lighting never misses once the gates pass.
    SeededRng full(77);
    for (int i = 0; i < 500; ++i) {
        CHECK(detect_marker(cam, intr, m, 0.0, 1.0, params, 0.0, full).has_value());
    }
}

TEST_CASE("brighter lighting never loses a detection at the same draw") {
    CameraIntrinsics intr;
    DetectorParams params;
    MarkerSpec m = make_marker(0, {0.0, 0.0, 0.0}, 0.0, 0.15);
    Pose3 cam = camera_pose_world({0.0, 0.0, 1.5}, 0.0);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SeededRng dim(seed), bright(seed);
        bool lo = detect_marker(cam, intr, m, 0.0, 0.3, params, 0.0, dim).has_value();
        bool hi = detect_marker(cam, intr, m, 0.0, 0.8, params, 0.0, bright).has_value();
        if (lo) CHECK(hi);
    }
}

TEST_CASE("gps fix is exact when noiseless and absent during dropout") {
    GpsParams p;
    p.sigma_xy = 0.0;
    p.sigma_z = 0.0;
    GpsBiasState bias;
    SeededRng rng(3);
    Vec3 truth{1.25, -0.5, 2.0};

    auto fix = gps_read(truth, p, 0.0, bias, 0.0, true, rng);
    REQUIRE(fix.has_value());
    CHECK(fix->x == truth.x);
    CHECK(fix->y == truth.y);
    CHECK(fix->z == truth.z);

    SeededRng twin(3);
    GpsBiasState b2;
    CHECK(!gps_read(truth, p, 0.0, b2, 0.0, false, twin));
    CHECK(!b2.has_last);
    CHECK(twin.next_u64() == SeededRng(3).next_u64());
}

TEST_CASE("gps consumes six gaussians per fix regardless of parameters") {
    GpsParams p;
    GpsBiasState bias;
    SeededRng rng(17), twin(17);
    Vec3 truth{0.0, 0.0, 1.0};
    for (int k = 0; k < 3; ++k) {
        REQUIRE(gps_read(truth, p, 0.05, bias, 0.2 * k, true, rng).has_value());
        for (int i = 0; i < 6; ++i) twin.next_gaussian(0.0, 1.0);
        CHECK(rng.next_u64() == twin.next_u64());
        rng = twin;  // keep both streams aligned for the next fix
    }
}

TEST_CASE("gps bias walk scales with the gap since the last fix") {
    GpsParams quiet;
    quiet.sigma_xy = 0.0;
    quiet.sigma_z = 0.0;
    double drift = 0.1;
    Vec3 truth{2.0, 3.0, 1.5};

    // Run A: fixes at t=0 and t=1. Run B: same seed, fix at t=0, dropout at
    // t=1, fix at t=2. The widened gap scales the same unit draws by sqrt(2).
    SeededRng ra(91), rb(91);
    GpsBiasState ba, bb;
    gps_read(truth, quiet, drift, ba, 0.0, true, ra);
    gps_read(truth, quiet, drift, bb, 0.0, true, rb);
    auto fa = gps_read(truth, quiet, drift, ba, 1.0, true, ra);
    CHECK(!gps_read(truth, quiet, drift, bb, 1.0, false, rb));
    auto fb = gps_read(truth, quiet, drift, bb, 2.0, true, rb);
    REQUIRE(fa.has_value());
    REQUIRE(fb.has_value());
    double root2 = std::sqrt(2.0);
    CHECK(fb->x - truth.x == doctest::Approx(root2 * (fa->x - truth.x)).epsilon(1e-12));
    CHECK(fb->y - truth.y == doctest::Approx(root2 * (fa->y - truth.y)).epsilon(1e-12));
    CHECK(fb->z - truth.z == doctest::Approx(root2 * (fa->z - truth.z)).epsilon(1e-12));
}

TEST_CASE("gps bias variance envelope matches the random walk formula") {
    // drift 0.1 m/sqrt(s), 100 fixes at 1 Hz: bias std after the run is
    // 0.1*sqrt(99) = 0.995 (the first fix anchors the walk origin).
    GpsParams quiet;
    quiet.sigma_xy = 0.0;
    quiet.sigma_z = 0.0;
    Vec3 truth{0.0, 0.0, 5.0};
    std::vector<double> finals;
    for (int trial = 0; trial < 1000; ++trial) {
        SeededRng rng(40000 + trial);
        GpsBiasState bias;
        std::optional<Vec3> fix;
        for (int k = 0; k < 100; ++k) {
            fix = gps_read(truth, quiet, 0.1, bias, double(k), true, rng);
        }
        finals.push_back(fix->x - truth.x);
    }
    double mean = 0.0;
    for (double v : finals) mean += v;
    mean /= finals.size();
    double var = 0.0;
    for (double v : finals) var += (v - mean) * (v - mean);
    var /= finals.size();
    double expected = 0.1 * std::sqrt(99.0);
    CHECK(std::sqrt(var) > expected * 0.8);
    CHECK(std::sqrt(var) < expected * 1.2);
}

TEST_CASE("range reads the surface directly below") {
    WorldModel world;
    world.bounds = {{-10, -10, 0}, {10, 10, 10}};
    SeededRng rng(1);

    CHECK(range_read({0.0, 0.0, 2.5}, world, 0.0, rng) == doctest::Approx(2.5));

    world.obstacles.push_back({BoxShape{{-1, -1, 0}, {1, 1, 1}}, false});
    CHECK(range_read({0.0, 0.0, 2.5}, world, 0.0, rng) == doctest::Approx(1.5));
    // Outside the footprint the box is ignored.
    CHECK(range_read({3.0, 0.0, 2.5}, world, 0.0, rng) == doctest::Approx(2.5));
    // Obstacle undersides are not modeled: below the top the return is the
    // ground.
    CHECK(range_read({0.0, 0.0, 0.5}, world, 0.0, rng) == doctest::Approx(0.5));

    world.obstacles.push_back({CylinderShape{4.0, 0.0, 0.8, 2.0}, false});
    CHECK(range_read({4.0, 0.0, 3.0}, world, 0.0, rng) == doctest::Approx(1.0));
    // Radial boundary is inclusive.
    CHECK(range_read({4.8, 0.0, 3.0}, world, 0.0, rng) == doctest::Approx(1.0));
    CHECK(range_read({4.81, 0.0, 3.0}, world, 0.0, rng) == doctest::Approx(3.0));

    // Highest qualifying surface wins.
    world.obstacles.push_back({BoxShape{{-1, -1, 0}, {1, 1, 2.2}}, false});
    CHECK(range_read({0.0, 0.0, 3.0}, world, 0.0, rng) == doctest::Approx(0.8));

    // Sitting exactly on a top reads zero, and the result never goes negative.
    CHECK(range_read({0.0, 0.0, 2.2}, world, 0.0, rng) == doctest::Approx(0.0));
}

TEST_CASE("range noise stays inside the five sigma envelope") {
    WorldModel world;
    world.bounds = {{-10, -10, 0}, {10, 10, 10}};
    SeededRng rng(55);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        double r = range_read({0.0, 0.0, 2.5}, world, 0.02, rng);
        worst = std::max(worst, std::abs(r - 2.5));
    }
    CHECK(worst < 0.1);

    SeededRng a(56), b(56);
    range_read({0.0, 0.0, 2.5}, world, 0.02, a);
    b.next_gaussian(0.0, 0.02);
    CHECK(a.next_u64() == b.next_u64());
}
