#include "skytest/harness.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "skytest/mapping.hpp"

namespace skytest {

namespace {

constexpr double kDt = 0.01;           // physics step, 100 Hz
constexpr int kControlDivisor = 5;     // 20 Hz
constexpr int kGpsDivisor = 20;        // 5 Hz
constexpr int kCameraNumerator = 30;   // 30 fps accumulated against 100 Hz
constexpr int kCameraDenominator = 100;
constexpr double kAirborneZ = 0.2;     // ground contact ignored until first crossed

Value fval(double v) { return Value{v}; }
Value ival(std::int64_t v) { return Value{v}; }

TelemetryRecord fault_record(std::uint64_t t_us, const EffectiveConditions& c,
                             int land_marker) {
    TelemetryRecord r{t_us, Channel::Fault, {}};
    r.payload = {
        {"gps", ival(c.gps_available ? 1 : 0)},
        {"drift", fval(c.gps_drift)},
        {"occ", fval(c.occlusion(land_marker))},
        {"light", fval(c.lighting)},
        {"wx", fval(c.wind_mean.x)},
        {"wy", fval(c.wind_mean.y)},
        {"wz", fval(c.wind_mean.z)},
        {"gust", fval(c.gust_sigma)},
        {"delay", fval(c.cmd_delay)},
        {"jitter", fval(c.cmd_jitter)},
    };
    return r;
}

struct AssembledPlan {
    bool ok = false;
    std::vector<Vec3> waypoints;
    MemoryReport map;
};

// Route through the surveyed waypoints on the mapped world. Start and each
// target are glued onto the voxel-center path so the controller flies real
// coordinates, not snapped ones.
AssembledPlan assemble_plan(const Scenario& scn, const MarkerSpec& pad,
                            SeededRng& rng) {
    std::vector<Vec3> targets;
    double alt = scn.mission.takeoff_altitude;
    targets.push_back({scn.start.position.x, scn.start.position.y, alt});
    for (const Vec3& g : scn.mission.gotos) targets.push_back(g);
    targets.push_back({pad.pose.position.x, pad.pose.position.y, alt});

    AssembledPlan out;
    if (scn.planner.kind == PlannerKind::Straight) {
        out.ok = true;
        out.waypoints = targets;
        return out;
    }

    OccupancyGrid grid(scn.map_resolution, scn.world.bounds);
    for (const Obstacle& ob : scn.world.obstacles) {
        if (ob.stale) continue;  // the map has not heard of these
        if (!insert_obstacle(grid, ob.shape).ok()) return out;
    }
    double clearance = scn.planner.inflation_radius >= 0.0 ? scn.planner.inflation_radius
                                                           : scn.drone.body_radius;
    // The mapping pipeline pads clearance against voxel discretization; see
    // PlannerConfig for why bare body-radius inflation can still clip.
    if (scn.planner.mapping) clearance += std::sqrt(3.0) * scn.map_resolution;
    if (clearance > 0.0) grid = inflate(grid, clearance);
    out.map = memory_report(grid);

    // Plan and smooth leg by leg: goto waypoints are mission constraints, so
    // shortcutting never splices across them.
    std::vector<Vec3> full;
    full.push_back(targets.front());
    for (std::size_t i = 0; i + 1 < targets.size(); ++i) {
        Expected<Path, PlanError> seg =
            scn.planner.kind == PlannerKind::AStar
                ? astar(grid, targets[i], targets[i + 1], scn.planner.connectivity)
                : rrt_star(grid, targets[i], targets[i + 1], scn.planner.rrt, rng);
        if (!seg.ok()) return out;
        std::vector<Vec3> leg;
        leg.push_back(targets[i]);
        for (const Vec3& w : seg.value().waypoints) leg.push_back(w);
        leg.push_back(targets[i + 1]);
        Path leg_path{leg, path_length(leg)};
        if (scn.planner.smoothing) {
            leg_path = shortcut_smooth(leg_path, grid, scn.planner.smoothing_attempts, rng);
        }
        for (std::size_t w = 1; w < leg_path.waypoints.size(); ++w) {
            full.push_back(leg_path.waypoints[w]);
        }
    }
    out.ok = true;
    out.waypoints = std::move(full);
    return out;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::infinity();
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

const char* mls_preset_name(MlsPreset p) {
    switch (p) {
        case MlsPreset::None: return "none";
        case MlsPreset::Mls1: return "mls1";
        case MlsPreset::Mls2: return "mls2";
        case MlsPreset::Mls3: return "mls3";
    }
    return "?";
}

bool mls_preset_from_name(const std::string& name, MlsPreset& out) {
    if (name == "none") out = MlsPreset::None;
    else if (name == "mls1") out = MlsPreset::Mls1;
    else if (name == "mls2") out = MlsPreset::Mls2;
    else if (name == "mls3") out = MlsPreset::Mls3;
    else return false;
    return true;
}

void apply_mls_preset(Scenario& s, MlsPreset p) {
    switch (p) {
        case MlsPreset::None:
            break;
        case MlsPreset::Mls1:
            s.filter.enabled = false;
            s.planner.kind = PlannerKind::Straight;
            s.planner.smoothing = false;
            s.planner.mapping = false;
            s.mission_params.recovery_enabled = false;
            break;
        case MlsPreset::Mls2:
            s.filter.enabled = true;
            s.planner.kind = PlannerKind::AStar;
            s.planner.smoothing = true;
            s.planner.mapping = false;
            s.mission_params.recovery_enabled = true;
            break;
        case MlsPreset::Mls3:
            s.filter.enabled = true;
            s.planner.kind = PlannerKind::RrtStar;
            s.planner.smoothing = true;
            s.planner.mapping = true;
            s.mission_params.recovery_enabled = true;
            break;
    }
}

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Success: return "success";
        case Outcome::Crash: return "crash";
        case Outcome::Abort: return "abort";
        case Outcome::Timeout: return "timeout";
    }
    return "?";
}

RunResult run_scenario(const Scenario& scn) {
    SeededRng root(scn.seed);
    SeededRng rng_wind = substream(root, RngStream::Wind);
    SeededRng rng_gps = substream(root, RngStream::Gps);
    SeededRng rng_range = substream(root, RngStream::Range);
    SeededRng rng_camera = substream(root, RngStream::Camera);
    SeededRng rng_planner = substream(root, RngStream::Planner);
    SeededRng rng_channel = substream(root, RngStream::Channel);

    const MarkerSpec* pad = nullptr;
    for (const MarkerSpec& m : scn.markers) {
        if (m.id == scn.mission.land_marker_id) pad = &m;
    }
    assert(pad != nullptr);  // the parser already enforced the reference

    AssembledPlan plan = assemble_plan(scn, *pad, rng_planner);

    ControllerGains gains = scn.gains;
    if (scn.gains_preset == GainsPreset::Aggressive) {
        gains.kp_xy *= 2.0;
        gains.descent_speed *= 0.75;
    }
    MissionController mission(gains, scn.mission_params, scn.mission.takeoff_altitude);
    mission.set_plan(plan.waypoints);

    TelemetryWriter writer(LogHeader{1, scn.name, scn.seed, scenario_hash(scn)});

    RigidState state;
    state.position = scn.start.position;
    state.yaw = scn.start.yaw;
    WindState wind;
    GpsBiasState gps_bias;
    FilteredMarkerState filter_state;
    DelayedChannel channel;
    VelocityCommand active_cmd;

    Vec3 nav_pos = scn.start.position;  // held between fixes
    double last_range = 0.0;
    int cam_acc = 0;
    std::uint64_t seq = 0;
    bool airborne = false;
    bool have_conditions = false;
    EffectiveConditions prev_cond;
    PhaseKind logged_phase = PhaseKind::Abort;  // sentinel != Takeoff
    bool phase_logged = false;

    RunMetrics met;
    met.map_voxels = plan.map.voxel_count;
    met.map_bytes = plan.map.bytes;
    std::size_t nominal_frames = 0;
    std::size_t detected_frames = 0;
    bool terminal = false;

    const int max_ticks = static_cast<int>(std::llround(scn.max_time / kDt));
    int k = 0;
    for (; k < max_ticks && !terminal; ++k) {
        const double t = k * kDt;
        const std::uint64_t t_us = static_cast<std::uint64_t>(k) * 10000u;

        // fault stage
        EffectiveConditions cond = faults_active(scn.faults, t);
        if (!have_conditions || !(cond == prev_cond)) {
            writer.append(fault_record(t_us, cond, pad->id));
            prev_cond = cond;
            have_conditions = true;
        }

        // sensor stage: gps, range, camera, in that order
        if (k % kGpsDivisor == 0) {
            std::optional<Vec3> fix = gps_read(state.position, scn.gps, cond.gps_drift,
                                               gps_bias, t, cond.gps_available, rng_gps);
            if (fix) {
                nav_pos = *fix;
                writer.append({t_us, Channel::GpsFix,
                               {{"x", fval(fix->x)}, {"y", fval(fix->y)}, {"z", fval(fix->z)}}});
            }
        }
        if (k % kControlDivisor == 0) {
            last_range = range_read(state.position, scn.world, scn.range_sigma, rng_range);
            writer.append({t_us, Channel::RangeRead, {{"r", fval(last_range)}}});
        }
        cam_acc += kCameraNumerator;
        if (cam_acc >= kCameraDenominator) {
            cam_acc -= kCameraDenominator;
            Pose3 cam_pose = camera_pose_world(state.position, state.yaw);
            for (const MarkerSpec& m : scn.markers) {
                double occ = cond.occlusion(m.id);
                if (m.id == pad->id &&
                    nominally_visible(cam_pose, scn.camera, m, occ, scn.detector)) {
                    ++nominal_frames;
                }
                std::optional<MarkerObservation> obs = detect_marker(
                    cam_pose, scn.camera, m, occ, cond.lighting, scn.detector, t, rng_camera);
                if (obs) {
                    TelemetryRecord r{t_us, Channel::MarkerObs, {{"id", ival(m.id)}}};
                    for (int c = 0; c < 4; ++c) {
                        std::string base = "c" + std::to_string(c);
                        r.payload.emplace_back(base + "x", fval(obs->corners[c].x));
                        r.payload.emplace_back(base + "y", fval(obs->corners[c].y));
                    }
                    writer.append(std::move(r));
                }
                if (m.id != pad->id) continue;
                // perception stage for the landing pad
                std::optional<MarkerPoseEstimate> accepted;
                if (obs) {
                    ++detected_frames;
                    Expected<MarkerPoseEstimate, EstimateError> est =
                        estimate_pose(*obs, scn.camera, m.side);
                    if (est.ok()) accepted = est.value();
                }
                filter_state = filter_update(filter_state, accepted, t, scn.filter);
                if (accepted) {
                    const Pose3& p = filter_state.smoothed;
                    writer.append({t_us, Channel::MarkerEst,
                                   {{"id", ival(m.id)},
                                    {"px", fval(p.position.x)},
                                    {"py", fval(p.position.y)},
                                    {"pz", fval(p.position.z)},
                                    {"qw", fval(p.orientation.w)},
                                    {"qx", fval(p.orientation.x)},
                                    {"qy", fval(p.orientation.y)},
                                    {"qz", fval(p.orientation.z)},
                                    {"rms", fval(accepted->rms)}}});
                }
            }
        }

        // mission stage
        bool issued = false;
        VelocityCommand issued_cmd;
        if (k % kControlDivisor == 0) {
            filter_state = filter_update(filter_state, std::nullopt, t, scn.filter);
            if (!plan.ok) mission.force_abort(AbortReason::PlanningFailed, t);
            if (geofence_check(state.position, scn.world.bounds)) {
                mission.force_abort(AbortReason::GeofenceBreach, t);
            }
            MissionInputs in;
            in.marker = filter_state;
            in.nav = NavEstimate{nav_pos, state.yaw};
            in.range = last_range;
            in.now = t;
            issued_cmd = mission.step(in);

            if (!phase_logged || mission.phase() != logged_phase) {
                if (mission.phase() == PhaseKind::Recovery) ++met.recoveries;
                writer.append({t_us, Channel::Phase,
                               {{"name", Value{std::string(phase_name(mission.phase()))}},
                                {"info", Value{mission.phase_info()}}}});
                logged_phase = mission.phase();
                phase_logged = true;
            }

            if (mission.phase() == PhaseKind::Touchdown) {
                double err = (state.position - pad->pose.position).norm_xy();
                writer.append({t_us, Channel::Touchdown,
                               {{"err", fval(err)},
                                {"x", fval(state.position.x)},
                                {"y", fval(state.position.y)},
                                {"z", fval(state.position.z)}}});
                met.outcome = Outcome::Success;
                met.landed = true;
                met.landing_error = err;
                met.touchdown_time = t;
                met.flight_time = t;
                terminal = true;
            } else if (mission.phase() == PhaseKind::Abort) {
                met.outcome = Outcome::Abort;
                met.abort_reason = mission.abort_reason();
                met.flight_time = t;
                terminal = true;
            } else {
                issued = true;
                writer.append({t_us, Channel::CmdIssue,
                               {{"seq", ival(static_cast<std::int64_t>(seq))},
                                {"vx", fval(issued_cmd.vx)},
                                {"vy", fval(issued_cmd.vy)},
                                {"vz", fval(issued_cmd.vz)},
                                {"yawr", fval(issued_cmd.yaw_rate)}}});
                ++met.commands_issued;
                if (scn.stage == Stage::HilEmu) {
                    channel.push(issued_cmd, seq, t, cond.cmd_delay, cond.cmd_jitter,
                                 rng_channel);
                }
                ++seq;
            }
        }

        // channel stage: latency emulation in hilemu, a wire in sil
        if (!terminal) {
            if (scn.stage == Stage::HilEmu) {
                for (const TimedCommand& d : channel.poll(t)) {
                    active_cmd = d.cmd;
                    double lat = t - d.issue_time;
                    met.cmd_latencies.push_back(lat);
                    ++met.commands_delivered;
                    writer.append({t_us, Channel::CmdDeliver,
                                   {{"seq", ival(static_cast<std::int64_t>(d.seq))},
                                    {"lat", fval(lat)}}});
                }
            } else if (issued) {
                active_cmd = issued_cmd;
                met.cmd_latencies.push_back(0.0);
                ++met.commands_delivered;
                writer.append({t_us, Channel::CmdDeliver,
                               {{"seq", ival(static_cast<std::int64_t>(seq - 1))},
                                {"lat", fval(0.0)}}});
            }
        }

        // telemetry stage: the state the tick started from
        writer.append({t_us, Channel::TruthPose,
                       {{"x", fval(state.position.x)},
                        {"y", fval(state.position.y)},
                        {"z", fval(state.position.z)},
                        {"vx", fval(state.velocity.x)},
                        {"vy", fval(state.velocity.y)},
                        {"vz", fval(state.velocity.z)},
                        {"yaw", fval(state.yaw)}}});
        if (terminal) break;

        // dynamics stage: integrate to t + dt, then contact checks
        wind.mean = cond.wind_mean;
        wind.gust_sigma = cond.gust_sigma;
        step_wind(wind, rng_wind, kDt);
        RigidState next = step_dynamics(state, active_cmd, scn.drone, wind, kDt);
        if (next.position.z > kAirborneZ) airborne = true;

        CollisionReport rep = check_collision(next, scn.world, scn.drone);
        bool ground_contact =
            rep.kind == ContactKind::Touchdown || rep.kind == ContactKind::GroundCrash;
        if (rep.kind == ContactKind::Obstacle || (airborne && ground_contact)) {
            const std::uint64_t t2 = static_cast<std::uint64_t>(k + 1) * 10000u;
            double t_end = (k + 1) * kDt;
            bool gentle_landing = rep.kind == ContactKind::Touchdown &&
                                  (mission.phase() == PhaseKind::Descend ||
                                   mission.phase() == PhaseKind::Touchdown);
            if (gentle_landing) {
                double err = (next.position - pad->pose.position).norm_xy();
                writer.append({t2, Channel::Touchdown,
                               {{"err", fval(err)},
                                {"x", fval(next.position.x)},
                                {"y", fval(next.position.y)},
                                {"z", fval(next.position.z)}}});
                met.outcome = Outcome::Success;
                met.landed = true;
                met.landing_error = err;
                met.touchdown_time = t_end;
            } else {
                const char* kind = rep.kind == ContactKind::Obstacle ? "obstacle" : "ground";
                writer.append({t2, Channel::Collision,
                               {{"kind", Value{std::string(kind)}},
                                {"index", ival(rep.obstacle_index)},
                                {"speed", fval(next.velocity.norm())}}});
                met.outcome = Outcome::Crash;
                met.collision_obstacle = rep.obstacle_index;
            }
            met.flight_time = t_end;
            writer.append({t2, Channel::TruthPose,
                           {{"x", fval(next.position.x)},
                            {"y", fval(next.position.y)},
                            {"z", fval(next.position.z)},
                            {"vx", fval(next.velocity.x)},
                            {"vy", fval(next.velocity.y)},
                            {"vz", fval(next.velocity.z)},
                            {"yaw", fval(next.yaw)}}});
            terminal = true;
        }
        state = next;
        state.time = (k + 1) * kDt;
    }

    if (!terminal) {
        met.outcome = Outcome::Timeout;
        met.flight_time = k * kDt;
    }
    met.final_phase = mission.phase();
    if (met.outcome != Outcome::Abort) met.abort_reason = AbortReason::None;
    met.detection_availability =
        nominal_frames == 0
            ? 1.0
            : static_cast<double>(detected_frames) / static_cast<double>(nominal_frames);

    return RunResult{std::move(met), writer.log()};
}

SuiteReport run_suite(const std::vector<std::pair<std::string, Scenario>>& scenarios,
                      int seeds_per_scenario) {
    SuiteReport report;
    for (const auto& [file, base] : scenarios) {
        for (int i = 0; i < seeds_per_scenario; ++i) {
            Scenario scn = base;
            scn.seed = base.seed + static_cast<std::uint64_t>(i);
            RunResult res = run_scenario(scn);
            report.rows.push_back(SuiteRow{file, scn.name, scn.seed, std::move(res.metrics)});
        }
    }

    const double n = static_cast<double>(report.rows.size());
    std::size_t successes = 0, crashes = 0, aborts = 0, timeouts = 0;
    std::vector<double> errors;
    std::vector<double> latencies;
    double avail_sum = 0.0;
    double flight_sum = 0.0;
    for (const SuiteRow& row : report.rows) {
        switch (row.metrics.outcome) {
            case Outcome::Success: ++successes; break;
            case Outcome::Crash: ++crashes; break;
            case Outcome::Abort: ++aborts; break;
            case Outcome::Timeout: ++timeouts; break;
        }
        if (row.metrics.landed) errors.push_back(row.metrics.landing_error);
        for (double l : row.metrics.cmd_latencies) latencies.push_back(l);
        avail_sum += row.metrics.detection_availability;
        flight_sum += row.metrics.flight_time;
    }

    const double inf = std::numeric_limits<double>::infinity();
    auto& m = report.metrics;
    m["runs"] = n;
    m["success_rate"] = n == 0 ? 0.0 : successes / n;
    m["collision_rate"] = n == 0 ? 0.0 : crashes / n;
    m["abort_rate"] = n == 0 ? 0.0 : aborts / n;
    m["timeout_rate"] = n == 0 ? 0.0 : timeouts / n;
    m["mean_landing_error"] =
        errors.empty()
            ? inf
            : std::accumulate(errors.begin(), errors.end(), 0.0) / errors.size();
    m["median_landing_error"] = median_of(errors);
    m["max_landing_error"] =
        errors.empty() ? inf : *std::max_element(errors.begin(), errors.end());
    m["detection_availability"] = n == 0 ? 1.0 : avail_sum / n;
    m["mean_flight_time"] = n == 0 ? 0.0 : flight_sum / n;

    Expected<LatencyStats, LatencyError> lat = measure_latency(latencies);
    m["latency_p50"] = lat.ok() ? lat.value().p50 : 0.0;
    m["latency_p95"] = lat.ok() ? lat.value().p95 : 0.0;
    m["latency_p99"] = lat.ok() ? lat.value().p99 : 0.0;
    m["latency_max"] = lat.ok() ? lat.value().max : 0.0;
    return report;
}

Expected<std::vector<Gate>, GateParseError> parse_gates(const std::string& text) {
    std::vector<Gate> gates;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string metric, op, value;
        if (!(ls >> metric)) continue;  // blank
        std::string extra;
        if (!(ls >> op >> value) || (ls >> extra)) {
            return GateParseError{line_no, "expected '<metric> <op> <value>'"};
        }
        Gate g;
        g.metric = metric;
        if (op == "<=") g.op = GateOp::Le;
        else if (op == ">=") g.op = GateOp::Ge;
        else if (op == "<") g.op = GateOp::Lt;
        else if (op == ">") g.op = GateOp::Gt;
        else return GateParseError{line_no, "unknown comparison '" + op + "'"};
        const char* first = value.data();
        const char* last = first + value.size();
        auto [p, ec] = std::from_chars(first, last, g.threshold);
        if (ec != std::errc() || p != last || !std::isfinite(g.threshold)) {
            return GateParseError{line_no, "bad threshold '" + value + "'"};
        }
        gates.push_back(std::move(g));
    }
    return gates;
}

Expected<std::vector<GateResult>, GateParseError> evaluate_gates(
    const SuiteReport& report, const std::vector<Gate>& gates) {
    std::vector<GateResult> out;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const Gate& g = gates[i];
        auto it = report.metrics.find(g.metric);
        if (it == report.metrics.end()) {
            return GateParseError{static_cast<int>(i + 1),
                                  "unknown metric '" + g.metric + "'"};
        }
        GateResult r;
        r.gate = g;
        r.actual = it->second;
        switch (g.op) {
            case GateOp::Le: r.pass = r.actual <= g.threshold; break;
            case GateOp::Ge: r.pass = r.actual >= g.threshold; break;
            case GateOp::Lt: r.pass = r.actual < g.threshold; break;
            case GateOp::Gt: r.pass = r.actual > g.threshold; break;
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string suite_report_json(const SuiteReport& report,
                              const std::vector<GateResult>& gates,
                              MlsPreset preset, int seeds_per_scenario) {
    using json = nlohmann::ordered_json;
    auto finite_or_null = [](double v) -> json {
        if (std::isfinite(v)) return v;
        return nullptr;
    };

    json runs = json::array();
    for (const SuiteRow& row : report.rows) {
        const RunMetrics& rm = row.metrics;
        json r;
        r["file"] = row.file;
        r["scenario"] = row.name;
        r["seed"] = row.seed;
        r["outcome"] = outcome_name(rm.outcome);
        r["abort_reason"] = abort_reason_name(rm.abort_reason);
        r["final_phase"] = phase_name(rm.final_phase);
        r["flight_time"] = rm.flight_time;
        r["landing_error"] = rm.landed ? json(rm.landing_error) : json(nullptr);
        r["detection_availability"] = rm.detection_availability;
        r["commands_issued"] = rm.commands_issued;
        r["recoveries"] = rm.recoveries;
        r["map_voxels"] = rm.map_voxels;
        runs.push_back(std::move(r));
    }

    json metrics;
    for (const auto& [k, v] : report.metrics) metrics[k] = finite_or_null(v);

    json gate_rows = json::array();
    bool all_pass = true;
    for (const GateResult& g : gates) {
        static const char* ops[] = {"<=", ">=", "<", ">"};
        json row;
        row["metric"] = g.gate.metric;
        row["op"] = ops[static_cast<int>(g.gate.op)];
        row["threshold"] = g.gate.threshold;
        row["actual"] = finite_or_null(g.actual);
        row["pass"] = g.pass;
        gate_rows.push_back(std::move(row));
        all_pass = all_pass && g.pass;
    }

    json doc;
    doc["preset"] = mls_preset_name(preset);
    doc["seeds_per_scenario"] = seeds_per_scenario;
    doc["runs"] = std::move(runs);
    doc["metrics"] = std::move(metrics);
    doc["gates"] = std::move(gate_rows);
    doc["gates_pass"] = all_pass;
    doc["notes"] = json::array({
        "landing error aggregates cover successful runs only and are null "
        "when no run landed",
        "latency percentiles pool delivered commands across every run",
    });
    return doc.dump(2) + "\n";
}

}  // namespace skytest
