#include "skytest/world.hpp"

namespace skytest {

Aabb shape_aabb(const Shape& s) {
    if (const auto* b = std::get_if<BoxShape>(&s)) return {b->min, b->max};
    const auto& c = std::get<CylinderShape>(s);
    return {{c.cx - c.radius, c.cy - c.radius, 0.0},
            {c.cx + c.radius, c.cy + c.radius, c.height}};
}

bool shape_contains(const Shape& s, const Vec3& p) {
    if (const auto* b = std::get_if<BoxShape>(&s)) {
        return p.x >= b->min.x && p.x <= b->max.x && p.y >= b->min.y &&
               p.y <= b->max.y && p.z >= b->min.z && p.z <= b->max.z;
    }
    const auto& c = std::get<CylinderShape>(s);
    double dx = p.x - c.cx;
    double dy = p.y - c.cy;
    return dx * dx + dy * dy <= c.radius * c.radius && p.z >= 0.0 && p.z <= c.height;
}

double shape_distance(const Shape& s, const Vec3& p) {
    if (const auto* b = std::get_if<BoxShape>(&s)) {
        double dx = std::max({b->min.x - p.x, 0.0, p.x - b->max.x});
        double dy = std::max({b->min.y - p.y, 0.0, p.y - b->max.y});
        double dz = std::max({b->min.z - p.z, 0.0, p.z - b->max.z});
        return std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    const auto& c = std::get<CylinderShape>(s);
    double radial = std::max(0.0, std::hypot(p.x - c.cx, p.y - c.cy) - c.radius);
    double axial = std::max({-p.z, 0.0, p.z - c.height});
    return std::sqrt(radial * radial + axial * axial);
}

}  // namespace skytest
