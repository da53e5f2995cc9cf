#include "skytest/worldgen.hpp"

#include <cmath>
#include <cstdio>

namespace skytest {

namespace {

constexpr int kMaxPlacementAttempts = 1000;

double uniform_in(SeededRng& rng, double lo, double hi) {
    return lo + rng.next_uniform() * (hi - lo);
}

int uniform_int(SeededRng& rng, int lo, int hi) {
    int span = hi - lo + 1;
    int v = lo + static_cast<int>(rng.next_uniform() * span);
    return v > hi ? hi : v;
}

std::string indexed_name(Family f, int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%03d", family_name(f), i);
    return buf;
}

// Start and pad positions with a minimum separation; the drone takes off
// from the ground next to nothing.
bool place_endpoints(SeededRng& rng, Scenario& s, double min_separation,
                     double max_separation) {
    for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
        Vec3 pad{uniform_in(rng, -3.5, 3.5), uniform_in(rng, -3.5, 3.5), 0.0};
        Vec3 start{uniform_in(rng, -3.5, 3.5), uniform_in(rng, -3.5, 3.5), 0.0};
        double d = (pad - start).norm_xy();
        if (d < min_separation || d > max_separation) continue;
        double pad_yaw = uniform_in(rng, -kPi, kPi);
        s.markers = {make_marker(0, pad, pad_yaw, 0.15)};
        s.start.position = start;
        s.start.yaw = uniform_in(rng, -kPi, kPi);
        return true;
    }
    return false;
}

Scenario base_scenario(Family f, int i, SeededRng& rng) {
    Scenario s;
    s.name = indexed_name(f, i);
    s.seed = rng.next_u64();
    s.world.bounds = Aabb{{-6.0, -6.0, 0.0}, {6.0, 6.0, 8.0}};
    s.mission.takeoff_altitude = 3.0;
    s.mission.land_marker_id = 0;
    return s;
}

double shape_clearance_radius(const Shape& shape, const Vec3& column) {
    if (const BoxShape* b = std::get_if<BoxShape>(&shape)) {
        double dx = std::max({b->min.x - column.x, column.x - b->max.x, 0.0});
        double dy = std::max({b->min.y - column.y, column.y - b->max.y, 0.0});
        return std::hypot(dx, dy);
    }
    const CylinderShape& c = std::get<CylinderShape>(shape);
    double d = std::hypot(c.cx - column.x, c.cy - column.y) - c.radius;
    return d < 0.0 ? 0.0 : d;
}

Shape make_block(SeededRng& rng, double cx, double cy, double half_lo, double half_hi,
                 double h) {
    if (rng.next_uniform() < 0.5) {
        double ex = uniform_in(rng, half_lo, half_hi);
        double ey = uniform_in(rng, half_lo, half_hi);
        return BoxShape{{cx - ex, cy - ey, 0.0}, {cx + ex, cy + ey, h}};
    }
    double r = uniform_in(rng, half_lo, half_hi);
    return CylinderShape{cx, cy, r, h};
}

bool clears_endpoints(const Shape& shape, const Scenario& s) {
    // 2 m protected column over each endpoint
    return shape_clearance_radius(shape, s.markers[0].pose.position) >= 2.0 &&
           shape_clearance_radius(shape, s.start.position) >= 2.0;
}

bool add_obstacles(SeededRng& rng, Scenario& s, int count) {
    const double lo = -5.0, hi = 5.0;
    for (int n = 0; n < count; ++n) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
            // Mostly taller than the 3 m cruise altitude, so straight-line
            // routing has to get lucky while planned routes detour.
            double h = uniform_in(rng, 2.5, 6.0);
            double cx = uniform_in(rng, lo, hi);
            double cy = uniform_in(rng, lo, hi);
            Shape shape = make_block(rng, cx, cy, 0.35, 0.9, h);
            if (!clears_endpoints(shape, s)) continue;
            s.world.obstacles.push_back(Obstacle{shape, false});
            placed = true;
        }
        if (!placed) return false;
    }
    return true;
}

// Blockers strewn across the start-to-pad corridor. These make the direct
// route contested: tall enough to matter at cruise altitude, scattered far
// enough sideways that a lucky line can still thread through.
bool add_corridor_obstacles(SeededRng& rng, Scenario& s, int count) {
    Vec3 start = s.start.position;
    Vec3 pad = s.markers[0].pose.position;
    Vec3 dir = pad - start;
    double len = dir.norm_xy();
    if (len < 1e-9) return false;
    double nx = -dir.y / len, ny = dir.x / len;
    for (int n = 0; n < count; ++n) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
            double t = uniform_in(rng, 0.38, 0.62);
            double u = uniform_in(rng, -1.5, 1.5);
            double cx = start.x + dir.x * t + nx * u;
            double cy = start.y + dir.y * t + ny * u;
            double h = uniform_in(rng, 3.5, 6.0);
            Shape shape = make_block(rng, cx, cy, 0.4, 0.75, h);
            if (!clears_endpoints(shape, s)) continue;
            s.world.obstacles.push_back(Obstacle{shape, false});
            placed = true;
        }
        if (!placed) return false;
    }
    return true;
}

// Intermediate waypoints stretch the route so mid-flight events have time to
// land inside the travel or descent window.
void add_detour(SeededRng& rng, Scenario& s, int legs) {
    for (int i = 0; i < legs; ++i) {
        s.mission.gotos.push_back({uniform_in(rng, -4.0, 4.0),
                                   uniform_in(rng, -4.0, 4.0),
                                   s.mission.takeoff_altitude});
    }
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::Calm: return "calm";
        case Family::Cluttered: return "cluttered";
        case Family::Windy: return "windy";
        case Family::Occlusion: return "occlusion";
        case Family::Latency: return "latency";
    }
    return "?";
}

bool family_from_name(const std::string& name, Family& out) {
    if (name == "calm") out = Family::Calm;
    else if (name == "cluttered") out = Family::Cluttered;
    else if (name == "windy") out = Family::Windy;
    else if (name == "occlusion") out = Family::Occlusion;
    else if (name == "latency") out = Family::Latency;
    else return false;
    return true;
}

Expected<std::vector<Scenario>, WorldgenError> generate_family(Family f, int count,
                                                               std::uint64_t seed) {
    SeededRng rng = substream(SeededRng(seed), RngStream::Worldgen);
    std::vector<Scenario> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Scenario s = base_scenario(f, i, rng);
        double min_sep = 2.0, max_sep = 5.0;
        if (f == Family::Occlusion || f == Family::Latency) min_sep = 3.0;
        if (f == Family::Cluttered) { min_sep = 6.5; max_sep = 9.0; }
        if (!place_endpoints(rng, s, min_sep, max_sep)) {
            return WorldgenError{"endpoint placement failed for " + s.name};
        }
        switch (f) {
            case Family::Calm:
                break;
            case Family::Cluttered: {
                int n = uniform_int(rng, 9, 13);
                bool ok = add_corridor_obstacles(rng, s, 3) && add_obstacles(rng, s, n);
                if (!ok) {
                    return WorldgenError{"obstacle placement failed for " + s.name};
                }
                break;
            }
            case Family::Windy: {
                double theta = uniform_in(rng, -kPi, kPi);
                FaultEvent w;
                w.kind = FaultKind::Wind;
                w.wind_mean = {1.5 * std::cos(theta), 1.5 * std::sin(theta), 0.0};
                w.gust_sigma = 0.8;
                s.faults.push_back(w);
                break;
            }
            case Family::Occlusion: {
                add_detour(rng, s, 2);
                FaultEvent o;
                o.kind = FaultKind::Occlusion;
                o.marker_id = 0;
                o.fraction = 1.0;
                if (i % 2 == 0) {
                    // Aim the blackout at the final approach: takeoff plus
                    // cruise at roughly half of vmax-limited progress, plus
                    // search and align, puts descent entry near this estimate.
                    double len = 0.0;
                    Vec3 prev = s.start.position;
                    for (const Vec3& g : s.mission.gotos) {
                        len += (g - prev).norm_xy();
                        prev = g;
                    }
                    len += (s.markers[0].pose.position - prev).norm_xy();
                    double descend_eta = 5.9 + 0.5 * len;
                    o.t0 = descend_eta + uniform_in(rng, 0.5, 2.5);
                    o.t1 = o.t0 + uniform_in(rng, 3.0, 5.0);
                } else {
                    o.t0 = 0.0;
                    o.t1 = s.max_time;
                }
                s.faults.push_back(o);
                break;
            }
            case Family::Latency: {
                add_detour(rng, s, 5);
                s.stage = Stage::HilEmu;
                FaultEvent l;
                l.kind = FaultKind::CmdLatency;
                l.delay = 0.05;
                l.jitter = 0.01;
                s.faults.push_back(l);
                break;
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace skytest
