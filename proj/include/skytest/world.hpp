#pragma once

#include <algorithm>
#include <variant>
#include <vector>

#include "skytest/geom.hpp"

namespace skytest {

struct Aabb {
    Vec3 min;
    Vec3 max;

    bool operator==(const Aabb&) const = default;

    bool contains(const Vec3& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
               p.z >= min.z && p.z <= max.z;
    }
};

// Axis-aligned box, corners min/max.
struct BoxShape {
    Vec3 min;
    Vec3 max;
    bool operator==(const BoxShape&) const = default;
};

// Vertical cylinder standing on the ground plane.
struct CylinderShape {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
    double height = 0.0;
    bool operator==(const CylinderShape&) const = default;
};

using Shape = std::variant<BoxShape, CylinderShape>;

Aabb shape_aabb(const Shape& s);
bool shape_contains(const Shape& s, const Vec3& p);
// Euclidean distance from p to the shape surface; 0 inside.
double shape_distance(const Shape& s, const Vec3& p);

struct Obstacle {
    Shape shape;
    // Stale obstacles exist physically but are withheld from the map,
    // emulating a chart that is out of date.
    bool stale = false;
    bool operator==(const Obstacle&) const = default;
};

struct WorldModel {
    Aabb bounds;
    std::vector<Obstacle> obstacles;
    bool operator==(const WorldModel&) const = default;
};

}  // namespace skytest
