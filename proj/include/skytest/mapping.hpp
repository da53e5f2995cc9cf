#pragma once

#include <cstdint>
#include <unordered_set>

#include "skytest/expected.hpp"
#include "skytest/geom.hpp"
#include "skytest/world.hpp"

namespace skytest {

// Integer voxel coordinate, lattice anchored at the world origin.
struct VoxelKey {
    std::int32_t x = 0;
    std::int32_t y = 0;
    std::int32_t z = 0;
    bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
    std::size_t operator()(const VoxelKey& k) const {
        // FNV-1a over the three coordinates.
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint64_t v : {static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.x)),
                                static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.y)),
                                static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.z))}) {
            for (int i = 0; i < 4; ++i) {
                h ^= (v >> (8 * i)) & 0xff;
                h *= 1099511628211ull;
            }
        }
        return static_cast<std::size_t>(h);
    }
};

enum class MapError { OutOfBounds };

class OccupancyGrid {
  public:
    OccupancyGrid(double resolution, const Aabb& bounds)
        : resolution_(resolution), bounds_(bounds) {}

    double resolution() const { return resolution_; }
    const Aabb& bounds() const { return bounds_; }
    std::size_t occupied_count() const { return voxels_.size(); }

    VoxelKey key_of(const Vec3& p) const;
    Vec3 center_of(const VoxelKey& k) const;
    bool occupied(const VoxelKey& k) const { return voxels_.contains(k); }
    bool occupied_at(const Vec3& p) const { return occupied(key_of(p)); }
    bool in_bounds(const VoxelKey& k) const { return bounds_.contains(center_of(k)); }

    void mark(const VoxelKey& k) { voxels_.insert(k); }
    const std::unordered_set<VoxelKey, VoxelKeyHash>& voxels() const { return voxels_; }

  private:
    double resolution_;
    Aabb bounds_;
    std::unordered_set<VoxelKey, VoxelKeyHash> voxels_;
};

// Center-inclusion voxelization: a voxel is marked iff its center lies
// inside the shape (boundary inclusive). The shape's AABB must lie within
// the grid bounds.
Expected<std::size_t, MapError> insert_obstacle(OccupancyGrid& grid, const Shape& shape);

struct RaycastHit {
    bool hit = false;
    VoxelKey voxel;
    double distance = 0.0;  // to the entry face; 0 when starting inside
};

// Amanatides-Woo traversal. Stops at the first occupied voxel, at max_range,
// or on leaving the grid bounds.
RaycastHit raycast(const OccupancyGrid& grid, const Vec3& origin, const Vec3& dir,
                   double max_range);

struct MemoryReport {
    std::size_t voxel_count = 0;
    std::size_t bytes = 0;  // voxel_count * 16 (12-byte key, 4 bytes hashing overhead)
};

MemoryReport memory_report(const OccupancyGrid& grid);

// Dilation by a Euclidean ball over voxel centers. Marked voxels of the
// result are a superset of the input's.
OccupancyGrid inflate(const OccupancyGrid& grid, double radius);

}  // namespace skytest
