#pragma once

#include <optional>
#include <string>
#include <vector>

#include "skytest/dynamics.hpp"
#include "skytest/perception.hpp"
#include "skytest/scenario.hpp"

namespace skytest {

enum class PhaseKind {
    Takeoff,
    Travel,
    Search,
    Align,
    Descend,
    Touchdown,
    Recovery,
    Abort,
};

enum class AbortReason { None, MarkerLostTimeout, GeofenceBreach, PlanningFailed };

const char* phase_name(PhaseKind p);
const char* abort_reason_name(AbortReason r);

struct NavEstimate {
    Vec3 position;  // GPS-held; stale during dropouts
    double yaw = 0.0;
};

struct MissionInputs {
    FilteredMarkerState marker;  // marker pose in the camera frame, filtered
    NavEstimate nav;
    double range = 0.0;  // latest downward range sample
    double now = 0.0;
};

std::optional<AbortReason> geofence_check(const Vec3& position, const Aabb& bounds);

// Landing mission FSM. One step per control tick; returns the velocity
// setpoint. Transitions (terminal phases absorb):
//   Takeoff -> Travel; Travel -> Search after the last waypoint;
//   Search -> Align on Tracking, -> Abort on search timeout;
//   Align -> Descend after align_hold s continuously inside align_tolerance;
//   Align/Descend -> Recovery when the marker is Lost (or straight to Abort
//   with recovery disabled); Descend -> Touchdown below touchdown_range;
//   Recovery -> Align on reacquisition, -> Abort on its timeout.
// Recovery always climbs recovery_climb meters before any lateral motion.
// Yaw rate is never commanded.
class MissionController {
  public:
    MissionController(const ControllerGains& gains, const MissionParams& params,
                      double takeoff_altitude);

    // Travel route; must be set before the first step.
    void set_plan(std::vector<Vec3> waypoints);
    void force_abort(AbortReason reason, double now);

    VelocityCommand step(const MissionInputs& in);

    PhaseKind phase() const { return phase_; }
    AbortReason abort_reason() const { return abort_reason_; }
    int waypoint_index() const { return waypoint_index_; }
    // Token for phase telemetry: waypoint index in Travel, abort reason in
    // Abort, "-" elsewhere.
    std::string phase_info() const;

  private:
    void enter(PhaseKind p, double now);
    // Marker offset in the world frame, drone -> marker. Tracking refreshes
    // the world anchor; Coasting falls back to it.
    std::optional<Vec3> marker_offset(const MissionInputs& in);
    std::vector<Vec3> square_sweep(const Vec3& origin, int legs) const;

    ControllerGains gains_;
    MissionParams params_;
    double takeoff_altitude_;

    PhaseKind phase_ = PhaseKind::Takeoff;
    AbortReason abort_reason_ = AbortReason::None;
    double phase_entry_ = 0.0;

    std::vector<Vec3> plan_;
    int waypoint_index_ = 0;

    std::vector<Vec3> sweep_;
    std::size_t sweep_index_ = 0;
    double hold_altitude_ = 0.0;

    double align_hold_start_ = -1.0;
    double recovery_target_alt_ = 0.0;
    bool recovery_climbing_ = false;

    Vec3 marker_anchor_;
    bool has_anchor_ = false;
};

}  // namespace skytest
