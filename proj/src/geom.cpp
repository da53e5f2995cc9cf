#include "skytest/geom.hpp"

namespace skytest {

double wrap_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a <= 0.0) a += 2.0 * kPi;
    return a - kPi;
}

Quat Quat::from_yaw(double yaw) {
    return {std::cos(0.5 * yaw), 0.0, 0.0, std::sin(0.5 * yaw)};
}

Quat Quat::from_axis_angle(const Vec3& axis, double angle) {
    Vec3 u = axis.normalized();
    double h = 0.5 * angle;
    double s = std::sin(h);
    return {std::cos(h), u.x * s, u.y * s, u.z * s};
}

Quat Quat::from_rotvec(const Vec3& rv) {
    double angle = rv.norm();
    if (angle < 1e-12) {
        // First-order expansion keeps the map smooth through zero.
        return Quat{1.0, 0.5 * rv.x, 0.5 * rv.y, 0.5 * rv.z}.normalized();
    }
    return from_axis_angle(rv, angle);
}

Quat Quat::normalized() const {
    double n = norm();
    if (n <= 0.0) return {};
    return {w / n, x / n, y / n, z / n};
}

Quat Quat::operator*(const Quat& o) const {
    return {
        w * o.w - x * o.x - y * o.y - z * o.z,
        w * o.x + x * o.w + y * o.z - z * o.y,
        w * o.y - x * o.z + y * o.w + z * o.x,
        w * o.z + x * o.y - y * o.x + z * o.w,
    };
}

Vec3 Quat::rotate(const Vec3& v) const {
    // v' = v + 2 q_v x (q_v x v + w v)
    Vec3 qv{x, y, z};
    Vec3 t = qv.cross(v) * 2.0;
    return v + t * w + qv.cross(t);
}

double Quat::yaw() const {
    return std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
}

Vec3 Quat::to_rotvec() const {
    Quat q = w < 0.0 ? Quat{-w, -x, -y, -z} : *this;
    double vn = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
    if (vn < 1e-12) return {2.0 * q.x, 2.0 * q.y, 2.0 * q.z};
    double angle = 2.0 * std::atan2(vn, q.w);
    double s = angle / vn;
    return {q.x * s, q.y * s, q.z * s};
}

double Quat::angle_between(const Quat& a, const Quat& b) {
    double d = std::abs(a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z);
    if (d > 1.0) d = 1.0;
    return 2.0 * std::acos(d);
}

Quat Quat::slerp(const Quat& a, const Quat& b, double t) {
    Quat e = b;
    double d = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
    if (d < 0.0) {  // shortest arc
        e = {-b.w, -b.x, -b.y, -b.z};
        d = -d;
    }
    if (d > 0.9995) {
        // Nearly parallel: nlerp is within double precision of slerp.
        Quat r{a.w + t * (e.w - a.w), a.x + t * (e.x - a.x),
               a.y + t * (e.y - a.y), a.z + t * (e.z - a.z)};
        return r.normalized();
    }
    double theta = std::acos(d);
    double s = std::sin(theta);
    double ca = std::sin((1.0 - t) * theta) / s;
    double cb = std::sin(t * theta) / s;
    return Quat{ca * a.w + cb * e.w, ca * a.x + cb * e.x,
                ca * a.y + cb * e.y, ca * a.z + cb * e.z}
        .normalized();
}

Pose3 Pose3::inverse() const {
    Quat qi = orientation.conjugate();
    return {qi.rotate(-position), qi};
}

Pose3 Pose3::compose(const Pose3& o) const {
    return {transform(o.position), (orientation * o.orientation).normalized()};
}

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SeededRng::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double SeededRng::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::next_gaussian(double mean, double sigma) {
    // u1 in (0,1] so the log is finite.
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = next_uniform();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    return mean + sigma * z;
}

SeededRng SeededRng::substream(std::uint64_t tag) const {
    return SeededRng(mix64(state_ + (tag + 1) * kGolden));
}

SeededRng substream(const SeededRng& root, RngStream s) {
    return root.substream(static_cast<std::uint64_t>(s));
}

}  // namespace skytest
