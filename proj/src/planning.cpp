#include "skytest/planning.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace skytest {

namespace {

bool key_less(const VoxelKey& a, const VoxelKey& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
}

bool free_voxel(const OccupancyGrid& grid, const VoxelKey& k) {
    return grid.in_bounds(k) && !grid.occupied(k);
}

bool segment_free(const OccupancyGrid& grid, const Vec3& a, const Vec3& b) {
    double len = (b - a).norm();
    int n = std::max(1, static_cast<int>(std::ceil(len / (0.5 * grid.resolution()))));
    for (int i = 0; i <= n; ++i) {
        Vec3 p = a + (b - a) * (static_cast<double>(i) / n);
        if (!free_voxel(grid, grid.key_of(p))) return false;
    }
    return true;
}

}  // namespace

double path_length(const std::vector<Vec3>& w) {
    double c = 0.0;
    for (std::size_t i = 1; i < w.size(); ++i) c += (w[i] - w[i - 1]).norm();
    return c;
}

bool path_collision_free(const std::vector<Vec3>& w, const OccupancyGrid& grid) {
    if (w.empty()) return true;
    if (!free_voxel(grid, grid.key_of(w[0]))) return false;
    for (std::size_t i = 1; i < w.size(); ++i) {
        if (!segment_free(grid, w[i - 1], w[i])) return false;
    }
    return true;
}

Expected<Path, PlanError> astar(const OccupancyGrid& grid, const Vec3& start,
                                const Vec3& goal, int connectivity) {
    VoxelKey s = grid.key_of(start);
    VoxelKey g = grid.key_of(goal);
    if (!free_voxel(grid, s)) return PlanError::StartOccupied;
    if (!free_voxel(grid, g)) return PlanError::GoalOccupied;
    if (s == g) return Path{{grid.center_of(s)}, 0.0};

    double res = grid.resolution();

    // Fixed neighbor table; expansion order is part of determinism.
    std::vector<std::pair<VoxelKey, double>> offsets;
    for (std::int32_t dx = -1; dx <= 1; ++dx) {
        for (std::int32_t dy = -1; dy <= 1; ++dy) {
            for (std::int32_t dz = -1; dz <= 1; ++dz) {
                int manhattan = std::abs(dx) + std::abs(dy) + std::abs(dz);
                if (manhattan == 0) continue;
                if (connectivity == 6 && manhattan != 1) continue;
                offsets.push_back({{dx, dy, dz},
                                   res * std::sqrt(static_cast<double>(manhattan))});
            }
        }
    }

    auto heuristic = [&](const VoxelKey& k) {
        return (grid.center_of(g) - grid.center_of(k)).norm();
    };

    struct Entry {
        double f;
        double g_cost;
        VoxelKey key;
    };
    auto worse = [](const Entry& a, const Entry& b) {
        if (a.f != b.f) return a.f > b.f;
        if (a.g_cost != b.g_cost) return a.g_cost < b.g_cost;  // prefer deeper
        return key_less(b.key, a.key);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);
    std::unordered_map<VoxelKey, double, VoxelKeyHash> best_g;
    std::unordered_map<VoxelKey, VoxelKey, VoxelKeyHash> parent;

    best_g[s] = 0.0;
    open.push({heuristic(s), 0.0, s});
    while (!open.empty()) {
        Entry cur = open.top();
        open.pop();
        auto it = best_g.find(cur.key);
        if (it == best_g.end() || cur.g_cost > it->second) continue;  // stale
        if (cur.key == g) break;
        for (const auto& [off, cost] : offsets) {
            VoxelKey nk{cur.key.x + off.x, cur.key.y + off.y, cur.key.z + off.z};
            if (!free_voxel(grid, nk)) continue;
            double ng = cur.g_cost + cost;
            auto nit = best_g.find(nk);
            if (nit != best_g.end() && nit->second <= ng) continue;
            best_g[nk] = ng;
            parent[nk] = cur.key;
            open.push({ng + heuristic(nk), ng, nk});
        }
    }

    auto git = best_g.find(g);
    if (git == best_g.end()) return PlanError::NoPath;

    Path path;
    path.cost = git->second;
    std::vector<VoxelKey> keys{g};
    while (!(keys.back() == s)) keys.push_back(parent.at(keys.back()));
    for (auto rit = keys.rbegin(); rit != keys.rend(); ++rit) {
        path.waypoints.push_back(grid.center_of(*rit));
    }
    return path;
}

Expected<Path, PlanError> rrt_star(const OccupancyGrid& grid, const Vec3& start,
                                   const Vec3& goal, const RrtConfig& cfg,
                                   SeededRng& rng) {
    if (!free_voxel(grid, grid.key_of(start))) return PlanError::StartOccupied;
    if (!free_voxel(grid, grid.key_of(goal))) return PlanError::GoalOccupied;

    struct Node {
        Vec3 p;
        int parent;
        double cost;
        std::vector<int> children;
    };
    std::vector<Node> nodes{{start, -1, 0.0, {}}};

    const Aabb& b = grid.bounds();
    auto sample_point = [&]() -> Vec3 {
        if (rng.next_uniform() < cfg.goal_bias) return goal;
        double x = b.min.x + rng.next_uniform() * (b.max.x - b.min.x);
        double y = b.min.y + rng.next_uniform() * (b.max.y - b.min.y);
        double z = b.min.z + rng.next_uniform() * (b.max.z - b.min.z);
        return {x, y, z};
    };

    // Re-root subtree costs after a rewire.
    auto propagate = [&](int root) {
        std::vector<int> stack{root};
        while (!stack.empty()) {
            int i = stack.back();
            stack.pop_back();
            for (int c : nodes[i].children) {
                nodes[c].cost = nodes[i].cost + (nodes[c].p - nodes[i].p).norm();
                stack.push_back(c);
            }
        }
    };

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        Vec3 target = sample_point();

        int nearest = 0;
        double best_d = (nodes[0].p - target).norm();
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            double d = (nodes[i].p - target).norm();
            if (d < best_d) {
                best_d = d;
                nearest = static_cast<int>(i);
            }
        }
        if (best_d < 1e-9) continue;

        Vec3 dir = (target - nodes[nearest].p) * (1.0 / best_d);
        Vec3 fresh = nodes[nearest].p + dir * std::min(cfg.step, best_d);
        if (!free_voxel(grid, grid.key_of(fresh))) continue;

        double n = static_cast<double>(nodes.size());
        double radius = std::min(cfg.gamma * std::cbrt(std::log(n + 1.0) / (n + 1.0)),
                                 4.0 * cfg.step);

        int parent = -1;
        double parent_cost = 0.0;
        if (segment_free(grid, nodes[nearest].p, fresh)) {
            parent = nearest;
            parent_cost = nodes[nearest].cost + (fresh - nodes[nearest].p).norm();
        }
        std::vector<int> near;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if ((nodes[i].p - fresh).norm() <= radius) near.push_back(static_cast<int>(i));
        }
        for (int i : near) {
            double c = nodes[i].cost + (fresh - nodes[i].p).norm();
            if ((parent < 0 || c < parent_cost) && segment_free(grid, nodes[i].p, fresh)) {
                parent = i;
                parent_cost = c;
            }
        }
        if (parent < 0) continue;

        int fresh_idx = static_cast<int>(nodes.size());
        nodes.push_back({fresh, parent, parent_cost, {}});
        nodes[parent].children.push_back(fresh_idx);

        for (int i : near) {
            double through = parent_cost + (nodes[i].p - fresh).norm();
            if (through + 1e-12 < nodes[i].cost && segment_free(grid, nodes[i].p, fresh)) {
                auto& old_children = nodes[nodes[i].parent].children;
                old_children.erase(std::find(old_children.begin(), old_children.end(), i));
                nodes[i].parent = fresh_idx;
                nodes[i].cost = through;
                nodes[fresh_idx].children.push_back(i);
                propagate(i);
            }
        }
    }

    int best = -1;
    double best_total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double d = (goal - nodes[i].p).norm();
        if (d > cfg.step) continue;
        if (d > 0.0 && !segment_free(grid, nodes[i].p, goal)) continue;
        double total = nodes[i].cost + d;
        if (best < 0 || total < best_total) {
            best = static_cast<int>(i);
            best_total = total;
        }
    }
    if (best < 0) return PlanError::NoPath;

    std::vector<Vec3> rev;
    for (int i = best; i >= 0; i = nodes[i].parent) rev.push_back(nodes[i].p);
    Path path;
    path.waypoints.assign(rev.rbegin(), rev.rend());
    if ((goal - nodes[best].p).norm() > 0.0) path.waypoints.push_back(goal);
    path.cost = best_total;
    return path;
}

Path shortcut_smooth(const Path& path, const OccupancyGrid& grid, int attempts,
                     SeededRng& rng) {
    Path out = path;
    for (int a = 0; a < attempts; ++a) {
        std::size_t n = out.waypoints.size();
        // Draws are unconditional so the stream position is attempt-count based.
        std::size_t i = static_cast<std::size_t>(rng.next_uniform() * n);
        std::size_t j = static_cast<std::size_t>(rng.next_uniform() * n);
        if (n < 3) continue;
        if (i > j) std::swap(i, j);
        if (j >= n || j - i < 2) continue;
        if (!segment_free(grid, out.waypoints[i], out.waypoints[j])) continue;
        out.waypoints.erase(out.waypoints.begin() + i + 1, out.waypoints.begin() + j);
    }
    out.cost = path_length(out.waypoints);
    return out;
}

}  // namespace skytest
