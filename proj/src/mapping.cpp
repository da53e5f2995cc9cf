#include "skytest/mapping.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace skytest {

VoxelKey OccupancyGrid::key_of(const Vec3& p) const {
    return {static_cast<std::int32_t>(std::floor(p.x / resolution_)),
            static_cast<std::int32_t>(std::floor(p.y / resolution_)),
            static_cast<std::int32_t>(std::floor(p.z / resolution_))};
}

Vec3 OccupancyGrid::center_of(const VoxelKey& k) const {
    return {(k.x + 0.5) * resolution_, (k.y + 0.5) * resolution_,
            (k.z + 0.5) * resolution_};
}

Expected<std::size_t, MapError> insert_obstacle(OccupancyGrid& grid, const Shape& shape) {
    Aabb box = shape_aabb(shape);
    const Aabb& b = grid.bounds();
    if (box.min.x < b.min.x || box.min.y < b.min.y || box.min.z < b.min.z ||
        box.max.x > b.max.x || box.max.y > b.max.y || box.max.z > b.max.z) {
        return MapError::OutOfBounds;
    }
    VoxelKey lo = grid.key_of(box.min);
    VoxelKey hi = grid.key_of(box.max);
    std::size_t added = 0;
    for (std::int32_t x = lo.x; x <= hi.x; ++x) {
        for (std::int32_t y = lo.y; y <= hi.y; ++y) {
            for (std::int32_t z = lo.z; z <= hi.z; ++z) {
                VoxelKey k{x, y, z};
                if (shape_contains(shape, grid.center_of(k)) && !grid.occupied(k)) {
                    grid.mark(k);
                    ++added;
                }
            }
        }
    }
    return added;
}

RaycastHit raycast(const OccupancyGrid& grid, const Vec3& origin, const Vec3& dir,
                   double max_range) {
    Vec3 d = dir.normalized();
    if (d.norm() == 0.0) return {};
    double res = grid.resolution();
    VoxelKey key = grid.key_of(origin);
    if (grid.occupied(key)) return {true, key, 0.0};

    const double inf = std::numeric_limits<double>::infinity();
    double o[3] = {origin.x, origin.y, origin.z};
    double dv[3] = {d.x, d.y, d.z};
    std::int32_t k[3] = {key.x, key.y, key.z};
    std::int32_t step[3];
    double t_max[3], t_delta[3];
    for (int i = 0; i < 3; ++i) {
        if (dv[i] > 0.0) {
            step[i] = 1;
            t_max[i] = ((k[i] + 1) * res - o[i]) / dv[i];
            t_delta[i] = res / dv[i];
        } else if (dv[i] < 0.0) {
            step[i] = -1;
            t_max[i] = (k[i] * res - o[i]) / dv[i];
            t_delta[i] = -res / dv[i];
        } else {
            step[i] = 0;
            t_max[i] = inf;
            t_delta[i] = inf;
        }
    }

    double t = 0.0;
    while (true) {
        int axis = 0;
        if (t_max[1] < t_max[axis]) axis = 1;
        if (t_max[2] < t_max[axis]) axis = 2;
        t = t_max[axis];
        if (t > max_range) return {};
        k[axis] += step[axis];
        t_max[axis] += t_delta[axis];
        VoxelKey cur{k[0], k[1], k[2]};
        if (!grid.in_bounds(cur)) return {};
        if (grid.occupied(cur)) return {true, cur, t};
    }
}

MemoryReport memory_report(const OccupancyGrid& grid) {
    return {grid.occupied_count(), grid.occupied_count() * 16};
}

OccupancyGrid inflate(const OccupancyGrid& grid, double radius) {
    OccupancyGrid out(grid.resolution(), grid.bounds());
    if (radius <= 0.0) {
        for (const auto& k : grid.voxels()) out.mark(k);
        return out;
    }
    double res = grid.resolution();
    std::int32_t r = static_cast<std::int32_t>(std::floor(radius / res));
    std::vector<VoxelKey> ball;
    for (std::int32_t x = -r; x <= r; ++x) {
        for (std::int32_t y = -r; y <= r; ++y) {
            for (std::int32_t z = -r; z <= r; ++z) {
                double dist = res * std::sqrt(double(x) * x + double(y) * y + double(z) * z);
                if (dist <= radius) ball.push_back({x, y, z});
            }
        }
    }
    for (const auto& k : grid.voxels()) {
        for (const auto& off : ball) {
            VoxelKey n{k.x + off.x, k.y + off.y, k.z + off.z};
            if (out.in_bounds(n)) out.mark(n);
        }
    }
    return out;
}

}  // namespace skytest
