#pragma once

#include <cmath>
#include <cstdint>

namespace skytest {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    bool operator==(const Vec3& o) const = default;

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    double norm_xy() const { return std::hypot(x, y); }
    Vec3 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    double norm() const { return std::hypot(x, y); }
};

// Wraps to (-pi, pi].
double wrap_angle(double a);

// Unit quaternion, scalar first. Stored normalized; compose/rotate assume it.
struct Quat {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Quat&) const = default;

    static Quat from_yaw(double yaw);
    static Quat from_axis_angle(const Vec3& axis, double angle);
    // Exponential map of a rotation vector (axis * angle).
    static Quat from_rotvec(const Vec3& rv);

    Quat conjugate() const { return {w, -x, -y, -z}; }
    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    Quat normalized() const;

    // Hamilton product: (*this) then applied after o, i.e. rotate(v) == this->rotate(o.rotate(v)).
    Quat operator*(const Quat& o) const;
    Vec3 rotate(const Vec3& v) const;

    double yaw() const;
    Vec3 to_rotvec() const;

    // Angle of the relative rotation between two unit quaternions, in [0, pi].
    static double angle_between(const Quat& a, const Quat& b);
    // Shortest-arc spherical interpolation, t in [0,1].
    static Quat slerp(const Quat& a, const Quat& b, double t);
};

struct Pose3 {
    Vec3 position;
    Quat orientation;
    bool operator==(const Pose3&) const = default;

    Vec3 transform(const Vec3& p) const { return orientation.rotate(p) + position; }
    Pose3 inverse() const;
    // this * o: apply o first, then this.
    Pose3 compose(const Pose3& o) const;
};

// SplitMix64. Counter-based, bit-reproducible across platforms; no libc rand,
// no std::mt19937, so draw sequences are part of the frozen contract.
class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    // [0, 1), 53-bit mantissa.
    double next_uniform();
    // Box-Muller. Always consumes exactly two uniforms, even for sigma == 0,
    // so draw counts downstream never depend on parameter values.
    double next_gaussian(double mean, double sigma);

    // Independent deterministic substream for a subsystem tag.
    SeededRng substream(std::uint64_t tag) const;

  private:
    std::uint64_t state_;
};

// Frozen subsystem tags for SeededRng::substream.
enum class RngStream : std::uint64_t {
    Wind = 1,
    Gps = 2,
    Range = 3,
    Camera = 4,
    Planner = 5,
    Channel = 6,
    Worldgen = 7,
};

SeededRng substream(const SeededRng& root, RngStream s);

}  // namespace skytest
