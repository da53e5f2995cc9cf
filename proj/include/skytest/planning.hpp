#pragma once

#include <vector>

#include "skytest/expected.hpp"
#include "skytest/geom.hpp"
#include "skytest/mapping.hpp"

namespace skytest {

struct Path {
    std::vector<Vec3> waypoints;
    double cost = 0.0;  // sum of segment lengths
};

enum class PlanError { NoPath, StartOccupied, GoalOccupied };

enum class PlannerKind { Straight, AStar, RrtStar };

struct RrtConfig {
    int max_iters = 4000;
    double step = 0.8;
    double goal_bias = 0.1;
    double gamma = 8.0;  // rewire radius scale
    bool operator==(const RrtConfig&) const = default;
};

struct PlannerConfig {
    PlannerKind kind = PlannerKind::AStar;
    int connectivity = 26;  // 6 or 26
    RrtConfig rrt;
    bool smoothing = true;
    int smoothing_attempts = 150;
    // Obstacle inflation radius in meters; negative means "use the drone
    // body radius". Planning to the body center without clearance is
    // reproduced with an explicit 0.
    double inflation_radius = -1.0;
    // Full mapping pipeline: pads inflation with a voxel-discretization
    // margin and reports map memory. Center-inclusion voxelization
    // underapproximates surfaces by up to half a voxel diagonal, and checked
    // path samples sit up to another half diagonal from their voxel center,
    // so without the margin a path can clear the grid yet pass inside the
    // true clearance radius.
    bool mapping = true;
    bool operator==(const PlannerConfig&) const = default;
};

double path_length(const std::vector<Vec3>& waypoints);

// Grid A* over voxel centers, Euclidean edge costs and heuristic. Ties on f
// break toward larger g, then lexicographically smaller key, which pins the
// expansion order. Start and goal are snapped to their voxels; voxels
// outside the bounds count as occupied.
Expected<Path, PlanError> astar(const OccupancyGrid& grid, const Vec3& start,
                                const Vec3& goal, int connectivity);

// RRT* with goal-biased uniform sampling over the grid bounds, linear-scan
// nearest neighbor, rewiring within min(gamma*(log n / n)^(1/3), 4*step).
// Segment feasibility is sampled every half resolution. Draw order per
// iteration is frozen: one bias uniform, then x/y/z uniforms unless the goal
// was chosen. The best goal connection is selected after the full budget.
Expected<Path, PlanError> rrt_star(const OccupancyGrid& grid, const Vec3& start,
                                   const Vec3& goal, const RrtConfig& cfg,
                                   SeededRng& rng);

// Random shortcutting: each attempt draws two indices and splices when the
// straight segment is collision-free. Cost never increases; a collision-free
// input stays collision-free.
Path shortcut_smooth(const Path& path, const OccupancyGrid& grid, int attempts,
                     SeededRng& rng);

// True when every sampled point along every segment is unoccupied and in
// bounds (half-resolution spacing).
bool path_collision_free(const std::vector<Vec3>& waypoints, const OccupancyGrid& grid);

}  // namespace skytest
