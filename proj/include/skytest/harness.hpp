#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "skytest/expected.hpp"
#include "skytest/mission.hpp"
#include "skytest/scenario.hpp"
#include "skytest/telemetry.hpp"

namespace skytest {

// Feature bundles for comparing system generations. None leaves the scenario
// untouched. Mls1: raw estimates, straight-line routes, no recovery. Mls2:
// filtering, grid A* with shortcut smoothing. Mls3: adds the full mapping
// pipeline (discretization-aware clearance, memory report) and sampling-based
// planning.
enum class MlsPreset { None, Mls1, Mls2, Mls3 };

const char* mls_preset_name(MlsPreset p);
bool mls_preset_from_name(const std::string& name, MlsPreset& out);
void apply_mls_preset(Scenario& s, MlsPreset p);

enum class Outcome { Success, Crash, Abort, Timeout };
const char* outcome_name(Outcome o);

struct RunMetrics {
    Outcome outcome = Outcome::Timeout;
    AbortReason abort_reason = AbortReason::None;
    PhaseKind final_phase = PhaseKind::Takeoff;
    double flight_time = 0.0;          // time at termination, s
    double landing_error = 0.0;        // horizontal distance to pad center, m
    bool landed = false;               // landing_error is meaningful
    double touchdown_time = 0.0;
    int collision_obstacle = -1;       // -1: none or ground
    double detection_availability = 1.0;
    std::size_t commands_issued = 0;
    std::size_t commands_delivered = 0;
    int recoveries = 0;
    std::vector<double> cmd_latencies;  // issue-to-delivery, delivered only
    std::size_t map_voxels = 0;         // occupied voxels in the planning grid
    std::size_t map_bytes = 0;          // estimated grid memory
};

struct RunResult {
    RunMetrics metrics;
    TelemetryLog log;
};

// Deterministic closed-loop run of one assembled scenario. The caller applies
// presets and seed overrides first; the log header hash covers the effective
// configuration.
RunResult run_scenario(const Scenario& scn);

struct SuiteRow {
    std::string file;  // basename the scenario came from
    std::string name;
    std::uint64_t seed = 0;
    RunMetrics metrics;
};

struct SuiteReport {
    std::vector<SuiteRow> rows;
    // Aggregates keyed by gate metric name. Landing-error aggregates cover
    // successful runs only and are +inf when there were none.
    std::map<std::string, double> metrics;
};

// Cross product of scenarios and seed indices (seed = scenario seed + index),
// rows in input order, seeds inner. Scenario order must already be fixed.
SuiteReport run_suite(const std::vector<std::pair<std::string, Scenario>>& scenarios,
                      int seeds_per_scenario);

enum class GateOp { Le, Ge, Lt, Gt };

struct Gate {
    std::string metric;
    GateOp op = GateOp::Le;
    double threshold = 0.0;
};

struct GateResult {
    Gate gate;
    double actual = 0.0;
    bool pass = false;
};

struct GateParseError {
    int line = 0;
    std::string message;
};

// One gate per line: "<metric> <=|>=|<|> <value>". Unknown metric names are
// rejected against the report's aggregate table.
Expected<std::vector<Gate>, GateParseError> parse_gates(const std::string& text);
Expected<std::vector<GateResult>, GateParseError> evaluate_gates(
    const SuiteReport& report, const std::vector<Gate>& gates);

std::string suite_report_json(const SuiteReport& report,
                              const std::vector<GateResult>& gates,
                              MlsPreset preset, int seeds_per_scenario);

}  // namespace skytest
