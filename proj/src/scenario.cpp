#include "skytest/scenario.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

namespace skytest {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t scenario_hash(const Scenario& s) { return fnv1a64(canonicalize(s)); }

namespace {

bool parse_double_token(const std::string& t, double& out) {
    auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    return res.ec == std::errc{} && res.ptr == t.data() + t.size() && std::isfinite(out);
}

bool parse_u64_token(const std::string& t, std::uint64_t& out) {
    auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    return res.ec == std::errc{} && res.ptr == t.data() + t.size();
}

bool parse_int_token(const std::string& t, int& out) {
    auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    return res.ec == std::errc{} && res.ptr == t.data() + t.size();
}

// One `set` override: parse/validate and canonical formatting.
struct SetKeyEntry {
    std::string name;
    std::function<std::string(Scenario&, const std::string&)> apply;
    std::function<std::string(const Scenario&)> format;
};

using DoubleRef = std::function<double&(Scenario&)>;

enum class Range { Positive, NonNegative, Unit, UnitPositive, Any };

bool range_ok(Range r, double v) {
    switch (r) {
        case Range::Positive: return v > 0.0;
        case Range::NonNegative: return v >= 0.0;
        case Range::Unit: return v >= 0.0 && v <= 1.0;
        case Range::UnitPositive: return v > 0.0 && v <= 1.0;
        case Range::Any: return true;
    }
    return false;
}

const char* range_text(Range r) {
    switch (r) {
        case Range::Positive: return "expected value > 0";
        case Range::NonNegative: return "expected value >= 0";
        case Range::Unit: return "expected value in [0, 1]";
        case Range::UnitPositive: return "expected value in (0, 1]";
        case Range::Any: return "";
    }
    return "";
}

SetKeyEntry double_key(std::string name, DoubleRef ref, Range range) {
    SetKeyEntry e;
    e.name = std::move(name);
    e.apply = [ref, range](Scenario& s, const std::string& v) -> std::string {
        double d;
        if (!parse_double_token(v, d)) return "expected a number";
        if (!range_ok(range, d)) return range_text(range);
        ref(s) = d;
        return {};
    };
    e.format = [ref](const Scenario& s) {
        return format_double(ref(const_cast<Scenario&>(s)));
    };
    return e;
}

SetKeyEntry bool_key(std::string name, std::function<bool&(Scenario&)> ref) {
    SetKeyEntry e;
    e.name = std::move(name);
    e.apply = [ref](Scenario& s, const std::string& v) -> std::string {
        if (v == "on") ref(s) = true;
        else if (v == "off") ref(s) = false;
        else return "expected on|off";
        return {};
    };
    e.format = [ref](const Scenario& s) {
        return ref(const_cast<Scenario&>(s)) ? "on" : "off";
    };
    return e;
}

SetKeyEntry int_key(std::string name, std::function<int&(Scenario&)> ref, int lo) {
    SetKeyEntry e;
    e.name = std::move(name);
    e.apply = [ref, lo](Scenario& s, const std::string& v) -> std::string {
        int i;
        if (!parse_int_token(v, i)) return "expected an integer";
        if (i < lo) return "integer out of range";
        ref(s) = i;
        return {};
    };
    e.format = [ref](const Scenario& s) {
        return std::to_string(ref(const_cast<Scenario&>(s)));
    };
    return e;
}

// Sorted by key; canonicalize emits them in this order.
const std::vector<SetKeyEntry>& set_table() {
    static const std::vector<SetKeyEntry> table = [] {
        std::vector<SetKeyEntry> t;
        t.push_back(double_key("camera.cx", [](Scenario& s) -> double& { return s.camera.cx; }, Range::Any));
        t.push_back(double_key("camera.cy", [](Scenario& s) -> double& { return s.camera.cy; }, Range::Any));
        t.push_back(double_key("camera.fx", [](Scenario& s) -> double& { return s.camera.fx; }, Range::Positive));
        t.push_back(double_key("camera.fy", [](Scenario& s) -> double& { return s.camera.fy; }, Range::Positive));
        t.push_back(int_key("camera.height", [](Scenario& s) -> int& { return s.camera.height; }, 1));
        t.push_back(double_key("camera.k1", [](Scenario& s) -> double& { return s.camera.dist[0]; }, Range::Any));
        t.push_back(double_key("camera.k2", [](Scenario& s) -> double& { return s.camera.dist[1]; }, Range::Any));
        t.push_back(double_key("camera.k3", [](Scenario& s) -> double& { return s.camera.dist[4]; }, Range::Any));
        t.push_back(double_key("camera.p1", [](Scenario& s) -> double& { return s.camera.dist[2]; }, Range::Any));
        t.push_back(double_key("camera.p2", [](Scenario& s) -> double& { return s.camera.dist[3]; }, Range::Any));
        t.push_back(int_key("camera.width", [](Scenario& s) -> int& { return s.camera.width; }, 1));
        t.push_back(double_key("detector.max_view_angle_deg", [](Scenario& s) -> double& { return s.detector.max_view_angle_deg; }, Range::Positive));
        t.push_back(double_key("detector.min_side_px", [](Scenario& s) -> double& { return s.detector.min_side_px; }, Range::NonNegative));
        t.push_back(double_key("detector.occlusion_cutoff", [](Scenario& s) -> double& { return s.detector.occlusion_cutoff; }, Range::UnitPositive));
        t.push_back(double_key("detector.pixel_sigma", [](Scenario& s) -> double& { return s.detector.pixel_sigma; }, Range::NonNegative));
        t.push_back(double_key("dynamics.touchdown_speed", [](Scenario& s) -> double& { return s.drone.touchdown_speed; }, Range::Positive));
        t.push_back(double_key("dynamics.vz_max", [](Scenario& s) -> double& { return s.drone.vz_max; }, Range::Positive));
        t.push_back(double_key("dynamics.wind_coupling", [](Scenario& s) -> double& { return s.drone.wind_coupling; }, Range::NonNegative));
        t.push_back(double_key("dynamics.yaw_rate_max", [](Scenario& s) -> double& { return s.drone.yaw_rate_max; }, Range::Positive));
        t.push_back(double_key("gains.align_tolerance", [](Scenario& s) -> double& { return s.gains.align_tolerance; }, Range::Positive));
        t.push_back(double_key("gains.descent_speed", [](Scenario& s) -> double& { return s.gains.descent_speed; }, Range::Positive));
        t.push_back(double_key("gains.kp_xy", [](Scenario& s) -> double& { return s.gains.kp_xy; }, Range::Positive));
        t.push_back(double_key("gains.kp_z", [](Scenario& s) -> double& { return s.gains.kp_z; }, Range::Positive));
        t.push_back(double_key("gps.sigma_xy", [](Scenario& s) -> double& { return s.gps.sigma_xy; }, Range::NonNegative));
        t.push_back(double_key("gps.sigma_z", [](Scenario& s) -> double& { return s.gps.sigma_z; }, Range::NonNegative));
        t.push_back(double_key("map.resolution", [](Scenario& s) -> double& { return s.map_resolution; }, Range::Positive));
        t.push_back(double_key("mission.align_hold", [](Scenario& s) -> double& { return s.mission_params.align_hold; }, Range::NonNegative));
        t.push_back(double_key("mission.horiz_cutoff", [](Scenario& s) -> double& { return s.mission_params.horiz_cutoff; }, Range::NonNegative));
        t.push_back(bool_key("mission.recovery", [](Scenario& s) -> bool& { return s.mission_params.recovery_enabled; }));
        t.push_back(double_key("mission.recovery_climb", [](Scenario& s) -> double& { return s.mission_params.recovery_climb; }, Range::Positive));
        t.push_back(double_key("mission.recovery_timeout", [](Scenario& s) -> double& { return s.mission_params.recovery_timeout; }, Range::Positive));
        t.push_back(double_key("mission.search_leg", [](Scenario& s) -> double& { return s.mission_params.search_leg; }, Range::Positive));
        t.push_back(double_key("mission.search_timeout", [](Scenario& s) -> double& { return s.mission_params.search_timeout; }, Range::Positive));
        t.push_back(double_key("mission.touchdown_range", [](Scenario& s) -> double& { return s.mission_params.touchdown_range; }, Range::Positive));
        t.push_back(double_key("mission.waypoint_tolerance", [](Scenario& s) -> double& { return s.mission_params.waypoint_tolerance; }, Range::Positive));
        t.push_back(double_key("perception.alpha", [](Scenario& s) -> double& { return s.filter.alpha; }, Range::UnitPositive));
        t.push_back(double_key("perception.coast", [](Scenario& s) -> double& { return s.filter.coast_timeout; }, Range::Positive));
        t.push_back(bool_key("perception.filter", [](Scenario& s) -> bool& { return s.filter.enabled; }));
        t.push_back(double_key("perception.lost", [](Scenario& s) -> double& { return s.filter.lost_timeout; }, Range::Positive));
        {
            SetKeyEntry e;
            e.name = "planner.connectivity";
            e.apply = [](Scenario& s, const std::string& v) -> std::string {
                if (v == "6") s.planner.connectivity = 6;
                else if (v == "26") s.planner.connectivity = 26;
                else return "expected 6|26";
                return {};
            };
            e.format = [](const Scenario& s) { return std::to_string(s.planner.connectivity); };
            t.push_back(e);
        }
        {
            SetKeyEntry e;
            e.name = "planner.inflation_radius";
            e.apply = [](Scenario& s, const std::string& v) -> std::string {
                double d;
                if (!parse_double_token(v, d)) return "expected a number";
                // any negative value means "auto": inflate by body radius
                s.planner.inflation_radius = d < 0.0 ? -1.0 : d;
                return {};
            };
            e.format = [](const Scenario& s) {
                return format_double(s.planner.inflation_radius);
            };
            t.push_back(e);
        }
        {
            SetKeyEntry e;
            e.name = "planner.kind";
            e.apply = [](Scenario& s, const std::string& v) -> std::string {
                if (v == "straight") s.planner.kind = PlannerKind::Straight;
                else if (v == "astar") s.planner.kind = PlannerKind::AStar;
                else if (v == "rrtstar") s.planner.kind = PlannerKind::RrtStar;
                else return "expected straight|astar|rrtstar";
                return {};
            };
            e.format = [](const Scenario& s) -> std::string {
                switch (s.planner.kind) {
                    case PlannerKind::Straight: return "straight";
                    case PlannerKind::AStar: return "astar";
                    case PlannerKind::RrtStar: return "rrtstar";
                }
                return "astar";
            };
            t.push_back(e);
        }
        t.push_back(bool_key("planner.mapping", [](Scenario& s) -> bool& { return s.planner.mapping; }));
        t.push_back(double_key("planner.rrt.gamma", [](Scenario& s) -> double& { return s.planner.rrt.gamma; }, Range::Positive));
        t.push_back(double_key("planner.rrt.goal_bias", [](Scenario& s) -> double& { return s.planner.rrt.goal_bias; }, Range::Unit));
        t.push_back(int_key("planner.rrt.iters", [](Scenario& s) -> int& { return s.planner.rrt.max_iters; }, 1));
        t.push_back(double_key("planner.rrt.step", [](Scenario& s) -> double& { return s.planner.rrt.step; }, Range::Positive));
        t.push_back(bool_key("planner.smoothing", [](Scenario& s) -> bool& { return s.planner.smoothing; }));
        t.push_back(int_key("planner.smoothing_attempts", [](Scenario& s) -> int& { return s.planner.smoothing_attempts; }, 0));
        t.push_back(double_key("range.sigma", [](Scenario& s) -> double& { return s.range_sigma; }, Range::NonNegative));
        t.push_back(double_key("sim.max_time", [](Scenario& s) -> double& { return s.max_time; }, Range::Positive));
        return t;
    }();
    return table;
}

std::vector<std::string> tokenize(const std::string& line) {
    std::string stripped = line;
    auto hash = stripped.find('#');
    if (hash != std::string::npos) stripped.erase(hash);
    std::istringstream in(stripped);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

struct LineRef {
    int line = 1;
    std::string token;
};

}  // namespace

Expected<Scenario, ParseError> parse_scenario(const std::string& text) {
    Scenario s;
    std::vector<std::string> lines;
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }
    int last_line = std::max<int>(1, static_cast<int>(lines.size()));

    bool seen_name = false, seen_seed = false, seen_stage = false;
    bool seen_world = false, seen_drone = false, seen_gains = false;
    bool seen_takeoff = false, seen_land = false;
    std::vector<LineRef> marker_refs, fault_refs, goto_refs, obstacle_refs;
    LineRef drone_ref, takeoff_ref, land_ref, world_ref;

    auto err = [](int line, std::string token, std::string msg) {
        return ParseError{line, std::move(token), std::move(msg)};
    };

    for (int ln = 1; ln <= static_cast<int>(lines.size()); ++ln) {
        auto tok = tokenize(lines[ln - 1]);
        if (tok.empty()) continue;
        const std::string& head = tok[0];

        auto need = [&](std::size_t n) { return tok.size() == n; };
        auto num = [&](std::size_t i, double& out) {
            if (!parse_double_token(tok[i], out)) {
                return false;
            }
            return true;
        };
        auto arity_err = [&]() { return err(ln, head, "wrong number of arguments"); };
        auto num_err = [&](std::size_t i) { return err(ln, tok[i], "expected a number"); };

        if (head == "scenario") {
            if (!need(2)) return arity_err();
            if (seen_name) return err(ln, head, "duplicate scenario directive");
            seen_name = true;
            s.name = tok[1];
        } else if (head == "seed") {
            if (!need(2)) return arity_err();
            if (seen_seed) return err(ln, head, "duplicate seed");
            if (!parse_u64_token(tok[1], s.seed)) return err(ln, tok[1], "expected an unsigned integer");
            seen_seed = true;
        } else if (head == "stage") {
            if (!need(2)) return arity_err();
            if (seen_stage) return err(ln, head, "duplicate stage directive");
            if (tok[1] == "sil") s.stage = Stage::Sil;
            else if (tok[1] == "hilemu") s.stage = Stage::HilEmu;
            else return err(ln, tok[1], "expected sil|hilemu");
            seen_stage = true;
        } else if (head == "world") {
            if (tok.size() < 2 || tok[1] != "bounds") return err(ln, tok.size() > 1 ? tok[1] : head, "expected world bounds");
            if (!need(8)) return arity_err();
            if (seen_world) return err(ln, head, "duplicate world bounds");
            double v[6];
            for (int i = 0; i < 6; ++i) {
                if (!num(2 + i, v[i])) return num_err(2 + i);
            }
            if (v[0] >= v[3] || v[1] >= v[4] || v[2] >= v[5]) {
                return err(ln, head, "bounds min must be below max on every axis");
            }
            s.world.bounds = {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
            seen_world = true;
            world_ref = {ln, head};
        } else if (head == "obstacle") {
            if (tok.size() < 2) return arity_err();
            if (tok[1] == "box") {
                if (!need(8)) return arity_err();
                double v[6];
                for (int i = 0; i < 6; ++i) {
                    if (!num(2 + i, v[i])) return num_err(2 + i);
                }
                if (v[0] >= v[3] || v[1] >= v[4] || v[2] >= v[5]) {
                    return err(ln, tok[1], "box min must be below max on every axis");
                }
                s.world.obstacles.push_back({BoxShape{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}}, false});
            } else if (tok[1] == "cyl") {
                if (!need(6)) return arity_err();
                double cx, cy, r, h;
                if (!num(2, cx)) return num_err(2);
                if (!num(3, cy)) return num_err(3);
                if (!num(4, r)) return num_err(4);
                if (!num(5, h)) return num_err(5);
                if (r <= 0.0 || h <= 0.0) return err(ln, tok[1], "cylinder radius and height must be > 0");
                s.world.obstacles.push_back({CylinderShape{cx, cy, r, h}, false});
            } else {
                return err(ln, tok[1], "expected box|cyl");
            }
            obstacle_refs.push_back({ln, head});
        } else if (head == "marker") {
            if (!need(11) || tok[1] != "id" || tok[3] != "pos" || tok[7] != "yaw" || tok[9] != "size") {
                return err(ln, head, "expected marker id <n> pos <x y z> yaw <r> size <m>");
            }
            MarkerSpec m;
            if (!parse_int_token(tok[2], m.id)) return err(ln, tok[2], "expected an integer id");
            int id = m.id;
            if (m.id < 0 || m.id >= 50) return err(ln, tok[2], "marker id must be in [0, 50)");
            double x, y, z, yaw, size;
            if (!num(4, x)) return num_err(4);
            if (!num(5, y)) return num_err(5);
            if (!num(6, z)) return num_err(6);
            if (!num(8, yaw)) return num_err(8);
            if (!num(10, size)) return num_err(10);
            if (size <= 0.0) return err(ln, tok[10], "marker size must be > 0");
            m = make_marker(id, {x, y, z}, yaw, size);
            for (const auto& other : s.markers) {
                if (other.id == m.id) return err(ln, tok[2], "duplicate marker id");
            }
            s.markers.push_back(m);
            marker_refs.push_back({ln, tok[2]});
        } else if (head == "drone") {
            if (!need(12) || tok[1] != "start" || tok[6] != "tau" || tok[8] != "vmax" || tok[10] != "radius") {
                return err(ln, head, "expected drone start <x y z yaw> tau <s> vmax <m/s> radius <m>");
            }
            if (seen_drone) return err(ln, head, "duplicate drone directive");
            double x, y, z, yaw, tau, vmax, radius;
            if (!num(2, x)) return num_err(2);
            if (!num(3, y)) return num_err(3);
            if (!num(4, z)) return num_err(4);
            if (!num(5, yaw)) return num_err(5);
            if (!num(7, tau)) return num_err(7);
            if (!num(9, vmax)) return num_err(9);
            if (!num(11, radius)) return num_err(11);
            if (tau <= 0.0) return err(ln, tok[7], "tau must be > 0");
            if (vmax <= 0.0) return err(ln, tok[9], "vmax must be > 0");
            if (radius < 0.0) return err(ln, tok[11], "radius must be >= 0");
            s.start = {{x, y, z}, yaw};
            s.drone.tau = tau;
            s.drone.v_max = vmax;
            s.drone.body_radius = radius;
            seen_drone = true;
            drone_ref = {ln, head};
        } else if (head == "gains") {
            if (!need(2)) return arity_err();
            if (seen_gains) return err(ln, head, "duplicate gains directive");
            if (tok[1] == "default") s.gains_preset = GainsPreset::Default;
            else if (tok[1] == "aggressive") s.gains_preset = GainsPreset::Aggressive;
            else return err(ln, tok[1], "expected default|aggressive");
            seen_gains = true;
        } else if (head == "mission") {
            if (tok.size() < 2) return arity_err();
            if (tok[1] == "takeoff") {
                if (!need(3)) return arity_err();
                if (seen_takeoff) return err(ln, head, "duplicate mission takeoff");
                double alt;
                if (!num(2, alt)) return num_err(2);
                if (alt <= 0.0) return err(ln, tok[2], "takeoff altitude must be > 0");
                s.mission.takeoff_altitude = alt;
                seen_takeoff = true;
                takeoff_ref = {ln, head};
            } else if (tok[1] == "goto") {
                if (!need(5)) return arity_err();
                double x, y, z;
                if (!num(2, x)) return num_err(2);
                if (!num(3, y)) return num_err(3);
                if (!num(4, z)) return num_err(4);
                s.mission.gotos.push_back({x, y, z});
                goto_refs.push_back({ln, head});
            } else if (tok[1] == "land") {
                if (!need(4) || tok[2] != "marker") return err(ln, head, "expected mission land marker <id>");
                if (seen_land) return err(ln, head, "duplicate mission land");
                if (!parse_int_token(tok[3], s.mission.land_marker_id)) {
                    return err(ln, tok[3], "expected an integer id");
                }
                seen_land = true;
                land_ref = {ln, tok[3]};
            } else {
                return err(ln, tok[1], "expected takeoff|goto|land");
            }
        } else if (head == "fault") {
            if (tok.size() < 2) return arity_err();
            FaultEvent f;
            const std::string& kind = tok[1];
            if (kind == "gps_dropout") {
                if (!need(4)) return arity_err();
                f.kind = FaultKind::GpsDropout;
                if (!num(2, f.t0)) return num_err(2);
                if (!num(3, f.t1)) return num_err(3);
                if (f.t0 >= f.t1) return err(ln, kind, "window start must precede end");
            } else if (kind == "gps_drift") {
                if (!need(5)) return arity_err();
                f.kind = FaultKind::GpsDrift;
                if (!num(2, f.drift_rate)) return num_err(2);
                if (!num(3, f.t0)) return num_err(3);
                if (!num(4, f.t1)) return num_err(4);
                if (f.drift_rate < 0.0) return err(ln, tok[2], "drift rate must be >= 0");
                if (f.t0 >= f.t1) return err(ln, kind, "window start must precede end");
            } else if (kind == "occlusion") {
                if (!need(8) || tok[2] != "marker" || tok[6] != "frac") {
                    return err(ln, kind, "expected fault occlusion marker <id> <t0 t1> frac <f>");
                }
                f.kind = FaultKind::Occlusion;
                if (!parse_int_token(tok[3], f.marker_id)) return err(ln, tok[3], "expected an integer id");
                if (!num(4, f.t0)) return num_err(4);
                if (!num(5, f.t1)) return num_err(5);
                if (!num(7, f.fraction)) return num_err(7);
                if (f.t0 >= f.t1) return err(ln, kind, "window start must precede end");
                if (f.fraction < 0.0 || f.fraction > 1.0) return err(ln, tok[7], "fraction must be in [0, 1]");
            } else if (kind == "lighting") {
                if (!need(5)) return arity_err();
                f.kind = FaultKind::Lighting;
                if (!num(2, f.factor)) return num_err(2);
                if (!num(3, f.t0)) return num_err(3);
                if (!num(4, f.t1)) return num_err(4);
                if (f.factor < 0.0 || f.factor > 1.0) return err(ln, tok[2], "factor must be in [0, 1]");
                if (f.t0 >= f.t1) return err(ln, kind, "window start must precede end");
            } else if (kind == "wind") {
                if (!need(8) || tok[2] != "mean" || tok[6] != "gust") {
                    return err(ln, kind, "expected fault wind mean <x y z> gust <sigma>");
                }
                f.kind = FaultKind::Wind;
                if (!num(3, f.wind_mean.x)) return num_err(3);
                if (!num(4, f.wind_mean.y)) return num_err(4);
                if (!num(5, f.wind_mean.z)) return num_err(5);
                if (!num(7, f.gust_sigma)) return num_err(7);
                if (f.gust_sigma < 0.0) return err(ln, tok[7], "gust sigma must be >= 0");
            } else if (kind == "latency") {
                if (!need(6) || tok[2] != "cmd" || tok[4] != "jitter") {
                    return err(ln, kind, "expected fault latency cmd <delay> jitter <j>");
                }
                f.kind = FaultKind::CmdLatency;
                if (!num(3, f.delay)) return num_err(3);
                if (!num(5, f.jitter)) return num_err(5);
                if (f.delay < 0.0) return err(ln, tok[3], "delay must be >= 0");
                if (f.jitter < 0.0) return err(ln, tok[5], "jitter must be >= 0");
            } else if (kind == "stale_obstacle") {
                if (!need(9) || tok[2] != "box") return err(ln, kind, "expected fault stale_obstacle box <x0 y0 z0 x1 y1 z1>");
                double v[6];
                for (int i = 0; i < 6; ++i) {
                    if (!num(3 + i, v[i])) return num_err(3 + i);
                }
                if (v[0] >= v[3] || v[1] >= v[4] || v[2] >= v[5]) {
                    return err(ln, tok[2], "box min must be below max on every axis");
                }
                s.world.obstacles.push_back({BoxShape{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}}, true});
                obstacle_refs.push_back({ln, head});
                continue;
            } else {
                return err(ln, kind, "unknown fault kind");
            }
            s.faults.push_back(f);
            fault_refs.push_back({ln, kind});
        } else if (head == "set") {
            if (!need(3)) return arity_err();
            bool found = false;
            for (const auto& e : set_table()) {
                if (e.name == tok[1]) {
                    std::string msg = e.apply(s, tok[2]);
                    if (!msg.empty()) return err(ln, tok[2], msg);
                    found = true;
                    break;
                }
            }
            if (!found) return err(ln, tok[1], "unknown set key");
        } else {
            return err(ln, head, "unknown directive");
        }
    }

    // File-level contract.
    if (!seen_seed) return err(last_line, "", "missing seed directive");
    if (!seen_world) return err(last_line, "", "missing world bounds");
    if (!seen_drone) return err(last_line, "", "missing drone directive");
    if (!seen_takeoff) return err(last_line, "", "missing mission takeoff");
    if (!seen_land) return err(last_line, "", "missing mission land");

    // Referential and geometric validation, pointing at the offending lines.
    const Aabb& b = s.world.bounds;
    auto inside = [&](const Vec3& p) { return b.contains(p); };
    for (std::size_t i = 0; i < s.markers.size(); ++i) {
        if (!inside(s.markers[i].pose.position)) {
            return err(marker_refs[i].line, marker_refs[i].token, "marker outside world bounds");
        }
    }
    {
        std::size_t oi = 0;
        for (std::size_t i = 0; i < s.world.obstacles.size(); ++i, ++oi) {
            Aabb box = shape_aabb(s.world.obstacles[i].shape);
            if (!inside(box.min) || !inside(box.max)) {
                return err(obstacle_refs[oi].line, obstacle_refs[oi].token,
                           "obstacle outside world bounds");
            }
        }
    }
    if (!inside(s.start.position)) {
        return err(drone_ref.line, drone_ref.token, "drone start outside world bounds");
    }
    for (std::size_t i = 0; i < s.mission.gotos.size(); ++i) {
        if (!inside(s.mission.gotos[i])) {
            return err(goto_refs[i].line, goto_refs[i].token, "waypoint outside world bounds");
        }
    }
    if (s.mission.takeoff_altitude > b.max.z) {
        return err(takeoff_ref.line, takeoff_ref.token, "takeoff altitude above world ceiling");
    }
    auto marker_exists = [&](int id) {
        for (const auto& m : s.markers) {
            if (m.id == id) return true;
        }
        return false;
    };
    if (!marker_exists(s.mission.land_marker_id)) {
        return err(land_ref.line, land_ref.token, "land marker id not declared");
    }
    for (std::size_t i = 0; i < s.faults.size(); ++i) {
        if (s.faults[i].kind == FaultKind::Occlusion && !marker_exists(s.faults[i].marker_id)) {
            return err(fault_refs[i].line, fault_refs[i].token, "occluded marker id not declared");
        }
    }
    return s;
}

std::string canonicalize(const Scenario& s) {
    std::string out;
    auto line = [&out](std::initializer_list<std::string> parts) {
        bool first = true;
        for (const auto& p : parts) {
            if (!first) out += ' ';
            out += p;
            first = false;
        }
        out += '\n';
    };
    auto f = format_double;

    line({"scenario", s.name});
    line({"seed", std::to_string(s.seed)});
    line({"stage", s.stage == Stage::Sil ? "sil" : "hilemu"});
    const Aabb& b = s.world.bounds;
    line({"world", "bounds", f(b.min.x), f(b.min.y), f(b.min.z), f(b.max.x), f(b.max.y), f(b.max.z)});
    for (const auto& o : s.world.obstacles) {
        if (o.stale) continue;
        if (const auto* box = std::get_if<BoxShape>(&o.shape)) {
            line({"obstacle", "box", f(box->min.x), f(box->min.y), f(box->min.z),
                  f(box->max.x), f(box->max.y), f(box->max.z)});
        } else {
            const auto& c = std::get<CylinderShape>(o.shape);
            line({"obstacle", "cyl", f(c.cx), f(c.cy), f(c.radius), f(c.height)});
        }
    }
    for (const auto& m : s.markers) {
        line({"marker", "id", std::to_string(m.id), "pos", f(m.pose.position.x),
              f(m.pose.position.y), f(m.pose.position.z), "yaw", f(m.yaw),
              "size", f(m.side)});
    }
    line({"drone", "start", f(s.start.position.x), f(s.start.position.y),
          f(s.start.position.z), f(s.start.yaw), "tau", f(s.drone.tau), "vmax",
          f(s.drone.v_max), "radius", f(s.drone.body_radius)});
    line({"gains", s.gains_preset == GainsPreset::Default ? "default" : "aggressive"});
    line({"mission", "takeoff", f(s.mission.takeoff_altitude)});
    for (const auto& g : s.mission.gotos) {
        line({"mission", "goto", f(g.x), f(g.y), f(g.z)});
    }
    line({"mission", "land", "marker", std::to_string(s.mission.land_marker_id)});
    for (const auto& fl : s.faults) {
        switch (fl.kind) {
            case FaultKind::GpsDropout:
                line({"fault", "gps_dropout", f(fl.t0), f(fl.t1)});
                break;
            case FaultKind::GpsDrift:
                line({"fault", "gps_drift", f(fl.drift_rate), f(fl.t0), f(fl.t1)});
                break;
            case FaultKind::Occlusion:
                line({"fault", "occlusion", "marker", std::to_string(fl.marker_id),
                      f(fl.t0), f(fl.t1), "frac", f(fl.fraction)});
                break;
            case FaultKind::Lighting:
                line({"fault", "lighting", f(fl.factor), f(fl.t0), f(fl.t1)});
                break;
            case FaultKind::Wind:
                line({"fault", "wind", "mean", f(fl.wind_mean.x), f(fl.wind_mean.y),
                      f(fl.wind_mean.z), "gust", f(fl.gust_sigma)});
                break;
            case FaultKind::CmdLatency:
                line({"fault", "latency", "cmd", f(fl.delay), "jitter", f(fl.jitter)});
                break;
        }
    }
    for (const auto& o : s.world.obstacles) {
        if (!o.stale) continue;
        const auto& box = std::get<BoxShape>(o.shape);
        line({"fault", "stale_obstacle", "box", f(box.min.x), f(box.min.y), f(box.min.z),
              f(box.max.x), f(box.max.y), f(box.max.z)});
    }
    for (const auto& e : set_table()) {
        line({"set", e.name, e.format(s)});
    }
    return out;
}

}  // namespace skytest
