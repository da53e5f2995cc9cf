#include "skytest/mission.hpp"

#include <algorithm>
#include <cmath>

#include "skytest/sensors.hpp"

namespace skytest {

const char* phase_name(PhaseKind p) {
    switch (p) {
        case PhaseKind::Takeoff: return "takeoff";
        case PhaseKind::Travel: return "travel";
        case PhaseKind::Search: return "search";
        case PhaseKind::Align: return "align";
        case PhaseKind::Descend: return "descend";
        case PhaseKind::Touchdown: return "touchdown";
        case PhaseKind::Recovery: return "recovery";
        case PhaseKind::Abort: return "abort";
    }
    return "?";
}

const char* abort_reason_name(AbortReason r) {
    switch (r) {
        case AbortReason::None: return "none";
        case AbortReason::MarkerLostTimeout: return "marker_lost_timeout";
        case AbortReason::GeofenceBreach: return "geofence_breach";
        case AbortReason::PlanningFailed: return "planning_failed";
    }
    return "?";
}

std::optional<AbortReason> geofence_check(const Vec3& position, const Aabb& bounds) {
    if (!bounds.contains(position)) return AbortReason::GeofenceBreach;
    return std::nullopt;
}

MissionController::MissionController(const ControllerGains& gains, const MissionParams& params,
                                     double takeoff_altitude)
    : gains_(gains), params_(params), takeoff_altitude_(takeoff_altitude) {}

void MissionController::set_plan(std::vector<Vec3> waypoints) { plan_ = std::move(waypoints); }

void MissionController::force_abort(AbortReason reason, double now) {
    if (phase_ == PhaseKind::Abort || phase_ == PhaseKind::Touchdown) return;
    abort_reason_ = reason;
    enter(PhaseKind::Abort, now);
}

std::string MissionController::phase_info() const {
    if (phase_ == PhaseKind::Travel) return std::to_string(waypoint_index_);
    if (phase_ == PhaseKind::Abort) return abort_reason_name(abort_reason_);
    return "-";
}

void MissionController::enter(PhaseKind p, double now) {
    phase_ = p;
    phase_entry_ = now;
    if (p == PhaseKind::Align) align_hold_start_ = -1.0;
}

std::optional<Vec3> MissionController::marker_offset(const MissionInputs& in) {
    const FilteredMarkerState& m = in.marker;
    if (!m.has_estimate) return std::nullopt;
    if (m.status == MarkerStatus::Tracking) {
        Quat cam = Quat::from_yaw(in.nav.yaw) * camera_mount_rotation();
        Vec3 offset = cam.rotate(m.smoothed.position);
        marker_anchor_ = in.nav.position + offset;
        has_anchor_ = true;
        return offset;
    }
    if (m.status == MarkerStatus::Coasting && has_anchor_) {
        return marker_anchor_ - in.nav.position;
    }
    return std::nullopt;
}

std::vector<Vec3> MissionController::square_sweep(const Vec3& origin, int legs) const {
    static const double kDirs[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(legs));
    Vec3 p = origin;
    for (int i = 0; i < legs; ++i) {
        double len = params_.search_leg * static_cast<double>(i / 2 + 1);
        p = p + Vec3{kDirs[i % 4][0] * len, kDirs[i % 4][1] * len, 0.0};
        out.push_back(p);
    }
    return out;
}

VelocityCommand MissionController::step(const MissionInputs& in) {
    VelocityCommand cmd{};
    const Vec3& pos = in.nav.position;

    switch (phase_) {
        case PhaseKind::Takeoff: {
            cmd.vz = gains_.kp_z * (takeoff_altitude_ - pos.z);
            if (std::abs(pos.z - takeoff_altitude_) < 0.1) {
                waypoint_index_ = 0;
                enter(plan_.empty() ? PhaseKind::Search : PhaseKind::Travel, in.now);
                if (phase_ == PhaseKind::Search) {
                    hold_altitude_ = pos.z;
                    sweep_ = square_sweep(pos, 24);
                    sweep_index_ = 0;
                }
            }
            break;
        }
        case PhaseKind::Travel: {
            const Vec3& wp = plan_[static_cast<std::size_t>(waypoint_index_)];
            Vec3 d = wp - pos;
            cmd.vx = gains_.kp_xy * d.x;
            cmd.vy = gains_.kp_xy * d.y;
            cmd.vz = gains_.kp_z * d.z;
            if (d.norm() < params_.waypoint_tolerance) {
                if (waypoint_index_ + 1 < static_cast<int>(plan_.size())) {
                    ++waypoint_index_;
                } else {
                    enter(PhaseKind::Search, in.now);
                    hold_altitude_ = pos.z;
                    sweep_ = square_sweep(pos, 24);
                    sweep_index_ = 0;
                }
            }
            break;
        }
        case PhaseKind::Search: {
            if (in.marker.status == MarkerStatus::Tracking) {
                enter(PhaseKind::Align, in.now);
                hold_altitude_ = pos.z;
                break;
            }
            if (in.now - phase_entry_ > params_.search_timeout) {
                abort_reason_ = AbortReason::MarkerLostTimeout;
                enter(PhaseKind::Abort, in.now);
                break;
            }
            if (sweep_index_ < sweep_.size()) {
                const Vec3& wp = sweep_[sweep_index_];
                Vec3 d = wp - pos;
                cmd.vx = gains_.kp_xy * d.x;
                cmd.vy = gains_.kp_xy * d.y;
                if (d.norm_xy() < params_.waypoint_tolerance) ++sweep_index_;
            }
            cmd.vz = gains_.kp_z * (hold_altitude_ - pos.z);
            break;
        }
        case PhaseKind::Align: {
            if (in.marker.status == MarkerStatus::Lost) {
                if (params_.recovery_enabled) {
                    enter(PhaseKind::Recovery, in.now);
                    recovery_target_alt_ = pos.z + params_.recovery_climb;
                    recovery_climbing_ = true;
                } else {
                    abort_reason_ = AbortReason::MarkerLostTimeout;
                    enter(PhaseKind::Abort, in.now);
                }
                break;
            }
            std::optional<Vec3> offset = marker_offset(in);
            if (offset) {
                cmd.vx = gains_.kp_xy * offset->x;
                cmd.vy = gains_.kp_xy * offset->y;
            }
            cmd.vz = gains_.kp_z * (hold_altitude_ - pos.z);
            bool held = offset && in.marker.status == MarkerStatus::Tracking &&
                        offset->norm_xy() < gains_.align_tolerance;
            if (held) {
                if (align_hold_start_ < 0.0) align_hold_start_ = in.now;
                if (in.now - align_hold_start_ >= params_.align_hold) {
                    enter(PhaseKind::Descend, in.now);
                }
            } else {
                align_hold_start_ = -1.0;
            }
            break;
        }
        case PhaseKind::Descend: {
            if (in.range < params_.touchdown_range) {
                enter(PhaseKind::Touchdown, in.now);
                break;
            }
            if (in.marker.status == MarkerStatus::Lost) {
                if (params_.recovery_enabled) {
                    enter(PhaseKind::Recovery, in.now);
                    recovery_target_alt_ = pos.z + params_.recovery_climb;
                    recovery_climbing_ = true;
                } else {
                    abort_reason_ = AbortReason::MarkerLostTimeout;
                    enter(PhaseKind::Abort, in.now);
                }
                break;
            }
            // Below the cutoff the marker fills the view; hold heading and sink.
            if (in.range > params_.horiz_cutoff) {
                std::optional<Vec3> offset = marker_offset(in);
                if (offset) {
                    cmd.vx = gains_.kp_xy * offset->x;
                    cmd.vy = gains_.kp_xy * offset->y;
                }
            }
            cmd.vz = -gains_.descent_speed;
            break;
        }
        case PhaseKind::Recovery: {
            if (in.now - phase_entry_ > params_.recovery_timeout) {
                abort_reason_ = AbortReason::MarkerLostTimeout;
                enter(PhaseKind::Abort, in.now);
                break;
            }
            if (in.marker.status == MarkerStatus::Tracking) {
                enter(PhaseKind::Align, in.now);
                hold_altitude_ = pos.z;
                break;
            }
            if (recovery_climbing_) {
                cmd.vz = gains_.kp_z * (recovery_target_alt_ - pos.z);
                if (std::abs(pos.z - recovery_target_alt_) < 0.1) {
                    recovery_climbing_ = false;
                    sweep_ = square_sweep(pos, 24);
                    sweep_index_ = 0;
                }
            } else {
                if (sweep_index_ < sweep_.size()) {
                    const Vec3& wp = sweep_[sweep_index_];
                    Vec3 d = wp - pos;
                    cmd.vx = gains_.kp_xy * d.x;
                    cmd.vy = gains_.kp_xy * d.y;
                    if (d.norm_xy() < params_.waypoint_tolerance) ++sweep_index_;
                }
                cmd.vz = gains_.kp_z * (recovery_target_alt_ - pos.z);
            }
            break;
        }
        case PhaseKind::Touchdown:
        case PhaseKind::Abort:
            break;
    }
    return cmd;
}

}  // namespace skytest
