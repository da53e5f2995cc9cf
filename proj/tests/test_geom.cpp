#include <doctest.h>

#include <cmath>

#include "skytest/geom.hpp"

using namespace skytest;

namespace {
bool vec_close(const Vec3& a, const Vec3& b, double tol = 1e-12) {
    return (a - b).norm() <= tol;
}
}  // namespace

TEST_CASE("wrap_angle maps to (-pi, pi]") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(2.0 * kPi) == doctest::Approx(0.0));
    CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(kPi + 0.25) == doctest::Approx(-kPi + 0.25));
    CHECK(wrap_angle(-7.5) == doctest::Approx(-7.5 + 2.0 * kPi));
    for (double a = -20.0; a < 20.0; a += 0.37) {
        double w = wrap_angle(a);
        CHECK(w > -kPi - 1e-12);
        CHECK(w <= kPi + 1e-12);
        CHECK(std::abs(std::remainder(w - a, 2.0 * kPi)) < 1e-9);
    }
}

TEST_CASE("yaw quaternion rotates the x axis") {
    Quat q = Quat::from_yaw(kPi / 2.0);
    CHECK(vec_close(q.rotate({1, 0, 0}), {0, 1, 0}, 1e-12));
    CHECK(vec_close(q.rotate({0, 1, 0}), {-1, 0, 0}, 1e-12));
    CHECK(vec_close(q.rotate({0, 0, 1}), {0, 0, 1}, 1e-12));
    CHECK(q.yaw() == doctest::Approx(kPi / 2.0));
}

TEST_CASE("yaw extraction inverts from_yaw across the range") {
    for (double y = -3.1; y <= 3.1; y += 0.173) {
        CHECK(Quat::from_yaw(y).yaw() == doctest::Approx(y).epsilon(1e-12));
    }
}

TEST_CASE("axis-angle and rotvec constructions agree") {
    Vec3 axis = Vec3{1.0, -2.0, 0.5}.normalized();
    double angle = 1.1;
    Quat a = Quat::from_axis_angle(axis, angle);
    Quat b = Quat::from_rotvec(axis * angle);
    CHECK(Quat::angle_between(a, b) < 1e-12);
}

TEST_CASE("rotvec round-trips through the exponential map") {
    Vec3 rv{0.3, -0.7, 0.2};
    Vec3 back = Quat::from_rotvec(rv).to_rotvec();
    CHECK(vec_close(rv, back, 1e-12));
    // zero rotation is exactly representable
    CHECK(vec_close(Quat{}.to_rotvec(), {0, 0, 0}, 0.0));
}

TEST_CASE("hamilton product composes rotations in application order") {
    Quat q1 = Quat::from_axis_angle(Vec3{0, 0, 1}, 0.7);
    Quat q2 = Quat::from_axis_angle(Vec3{1, 0, 0}, -0.4);
    Vec3 v{0.2, 1.3, -0.8};
    CHECK(vec_close((q1 * q2).rotate(v), q1.rotate(q2.rotate(v)), 1e-12));
}

TEST_CASE("conjugate inverts a unit quaternion") {
    Quat q = Quat::from_axis_angle(Vec3{0.3, 0.4, 0.5}.normalized(), 2.1);
    Vec3 v{1, 2, 3};
    CHECK(vec_close(q.conjugate().rotate(q.rotate(v)), v, 1e-12));
    CHECK(Quat::angle_between(q * q.conjugate(), Quat{}) < 1e-12);
}

TEST_CASE("rotation preserves norm and handedness") {
    Quat q = Quat::from_axis_angle(Vec3{-1, 2, 2}.normalized(), 1.9);
    Vec3 a{0.5, -1.0, 2.0}, b{1.5, 0.25, -0.75};
    CHECK(q.rotate(a).norm() == doctest::Approx(a.norm()));
    CHECK(vec_close(q.rotate(a.cross(b)), q.rotate(a).cross(q.rotate(b)), 1e-12));
}

TEST_CASE("angle_between handles the double cover") {
    Quat q = Quat::from_yaw(1.0);
    Quat neg{-q.w, -q.x, -q.y, -q.z};
    CHECK(Quat::angle_between(q, neg) < 1e-12);
    CHECK(Quat::angle_between(Quat::from_yaw(0.3), Quat::from_yaw(0.8)) ==
          doctest::Approx(0.5));
}

TEST_CASE("slerp endpoints and midpoint") {
    Quat a = Quat::from_yaw(0.2);
    Quat b = Quat::from_yaw(1.0);
    CHECK(Quat::angle_between(Quat::slerp(a, b, 0.0), a) < 1e-12);
    CHECK(Quat::angle_between(Quat::slerp(a, b, 1.0), b) < 1e-12);
    CHECK(Quat::slerp(a, b, 0.5).yaw() == doctest::Approx(0.6));
}

TEST_CASE("slerp takes the shortest arc across the wrap") {
    Quat a = Quat::from_yaw(3.0);
    Quat b = Quat::from_yaw(-3.0);
    // midpoint is at the seam, not at zero
    double mid = Quat::slerp(a, b, 0.5).yaw();
    CHECK(std::abs(wrap_angle(mid - kPi)) < 1e-9);
}

TEST_CASE("pose transform and inverse round-trip") {
    Pose3 p{{1.0, -2.0, 3.0}, Quat::from_axis_angle(Vec3{0, 1, 0}, 0.8)};
    Vec3 v{0.4, 0.5, -0.6};
    CHECK(vec_close(p.inverse().transform(p.transform(v)), v, 1e-12));
    Pose3 ident = p.compose(p.inverse());
    CHECK(ident.position.norm() < 1e-12);
    CHECK(Quat::angle_between(ident.orientation, Quat{}) < 1e-12);
}

TEST_CASE("pose composition applies right operand first") {
    Pose3 p{{1, 0, 0}, Quat::from_yaw(kPi / 2.0)};
    Pose3 q{{0, 2, 0}, Quat{}};
    Vec3 v{1, 0, 0};
    CHECK(vec_close(p.compose(q).transform(v), p.transform(q.transform(v)), 1e-12));
}

TEST_CASE("vector algebra basics") {
    Vec3 a{1, 2, 3}, b{-2, 0.5, 4};
    CHECK(a.dot(b) == doctest::Approx(11.0));
    CHECK(vec_close(a.cross(b), {2 * 4 - 3 * 0.5, 3 * -2 - 1 * 4, 1 * 0.5 - 2 * -2}, 0.0));
    CHECK(Vec3{3, 4, 0}.norm() == doctest::Approx(5.0));
    CHECK(Vec3{3, 4, 12}.norm_xy() == doctest::Approx(5.0));
    CHECK(Vec3{}.normalized() == Vec3{});
    CHECK(vec_close(Vec3{0, 0, 2}.normalized(), {0, 0, 1}, 0.0));
}
