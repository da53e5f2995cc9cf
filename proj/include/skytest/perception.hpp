#pragma once

#include <array>
#include <optional>

#include "skytest/expected.hpp"
#include "skytest/sensors.hpp"

namespace skytest {

// Marker frame expressed in the camera frame.
struct MarkerPoseEstimate {
    Pose3 pose;
    double rms = 0.0;  // root-mean-square corner reprojection distance, px
    double t = 0.0;
};

enum class EstimateError {
    DegenerateCorners,  // projected quad area <= 1 px^2
    NoConvergence,      // refined RMS above 5 px
};

// Planar pose from the four corners: DLT homography, decomposition with the
// sign fixed by positive corner depths, then Gauss-Newton on the eight
// reprojection residuals over (translation, rotation vector). Stops when the
// step norm drops below 1e-10 or after 50 iterations.
Expected<MarkerPoseEstimate, EstimateError> estimate_pose(
    const MarkerObservation& obs, const CameraIntrinsics& intr, double side);

// One Gauss-Newton linearization of the four-corner reprojection problem at
// the given marker-in-camera pose. Parameters are [translation, rotation
// vector], the rotation applied as a left increment (R' = exp(w) R).
// Residual rows are (u, v) per corner against `pixels`, in pixels; jacobian
// rows match. This is the exact linearization the refinement iterates on,
// exposed so the analytic derivatives can be checked numerically.
struct PnpLinearization {
    std::array<double, 8> residual{};
    std::array<std::array<double, 6>, 8> jacobian{};
};

PnpLinearization pnp_linearize(const Pose3& marker_in_camera,
                               const std::array<Vec2, 4>& pixels,
                               const CameraIntrinsics& intr, double side);

enum class MarkerStatus { Tracking, Coasting, Lost };

struct FilterParams {
    bool enabled = true;      // disabled: raw passthrough, status logic kept
    double alpha = 0.3;       // EMA weight of the newest sample
    double coast_timeout = 0.5;
    double lost_timeout = 2.0;
    bool operator==(const FilterParams&) const = default;
};

struct FilteredMarkerState {
    Pose3 smoothed;
    double last_seen = 0.0;
    MarkerStatus status = MarkerStatus::Lost;
    bool has_estimate = false;
};

// Status is a pure function of the age of the last accepted estimate:
// Tracking below coast_timeout, Coasting until lost_timeout, Lost after
// (and before any sighting). Call times must be nondecreasing.
FilteredMarkerState filter_update(const FilteredMarkerState& state,
                                  const std::optional<MarkerPoseEstimate>& est,
                                  double now, const FilterParams& params);

}  // namespace skytest
