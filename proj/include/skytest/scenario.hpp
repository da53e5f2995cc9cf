#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skytest/dynamics.hpp"
#include "skytest/expected.hpp"
#include "skytest/faults.hpp"
#include "skytest/perception.hpp"
#include "skytest/planning.hpp"
#include "skytest/sensors.hpp"
#include "skytest/world.hpp"

namespace skytest {

enum class Stage { Sil, HilEmu };

enum class GainsPreset { Default, Aggressive };

// Base controller gains. The Aggressive preset scales kp_xy by 2.0 and
// descent_speed by 0.75 at run assembly; the stored values stay canonical.
struct ControllerGains {
    double kp_xy = 1.2;
    double kp_z = 1.0;
    double descent_speed = 0.4;
    double align_tolerance = 0.10;
    bool operator==(const ControllerGains&) const = default;
};

struct DroneStart {
    Vec3 position;
    double yaw = 0.0;
    bool operator==(const DroneStart&) const = default;
};

struct MissionSpec {
    double takeoff_altitude = 3.0;
    std::vector<Vec3> gotos;
    int land_marker_id = 0;
    bool operator==(const MissionSpec&) const = default;
};

// Mission timing and search knobs, all overridable through `set mission.*`.
struct MissionParams {
    double waypoint_tolerance = 0.3;
    double search_leg = 0.5;        // expanding-square leg increment, m
    double search_timeout = 20.0;   // Search phase budget, s
    double align_hold = 0.5;        // continuous in-tolerance time, s
    double horiz_cutoff = 0.15;     // range under which lateral control stops
    double touchdown_range = 0.05;
    double recovery_climb = 1.0;
    double recovery_timeout = 10.0;
    bool recovery_enabled = true;
    bool operator==(const MissionParams&) const = default;
};

struct Scenario {
    std::string name = "unnamed";
    std::uint64_t seed = 0;
    Stage stage = Stage::Sil;
    WorldModel world;
    std::vector<MarkerSpec> markers;
    DroneStart start;
    DroneParams drone;
    GainsPreset gains_preset = GainsPreset::Default;
    ControllerGains gains;
    MissionSpec mission;
    MissionParams mission_params;
    std::vector<FaultEvent> faults;
    CameraIntrinsics camera;
    DetectorParams detector;
    FilterParams filter;
    GpsParams gps;
    double range_sigma = 0.01;
    double map_resolution = 0.2;
    PlannerConfig planner;
    double max_time = 120.0;

    bool operator==(const Scenario&) const = default;
};

struct ParseError {
    int line = 0;  // 1-based; always a real line of the input
    std::string token;
    std::string message;
};

// Line-oriented, whitespace-tokenized, `#` starts a comment. Unknown
// directives, arity mismatches, range violations, duplicate singleton
// directives, and broken marker references are all rejected. File-level
// omissions (no seed, no mission) point at the last line.
Expected<Scenario, ParseError> parse_scenario(const std::string& text);

// Deterministic serialization: fixed section order, shortest round-trip
// float formatting, every default materialized (including the whole `set`
// table, sorted by key). parse(canonicalize(s)) == s.
std::string canonicalize(const Scenario& s);

// FNV-1a 64 over the canonical bytes; lowercase hex in log headers.
std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t scenario_hash(const Scenario& s);

std::string format_double(double v);

}  // namespace skytest
