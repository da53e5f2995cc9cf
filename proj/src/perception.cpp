#include "skytest/perception.hpp"

#include <Eigen/Dense>

namespace skytest {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return m;
}

Eigen::Matrix3d rodrigues(const Eigen::Vector3d& w) {
    double theta = w.norm();
    if (theta < 1e-12) return Eigen::Matrix3d::Identity() + skew(w);
    Eigen::Matrix3d k = skew(w / theta);
    return Eigen::Matrix3d::Identity() + std::sin(theta) * k +
           (1.0 - std::cos(theta)) * k * k;
}

Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& m) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return r;
}

struct Candidate {
    Eigen::Matrix3d r;
    Eigen::Vector3d t;
    bool depths_ok = false;
    double rms = 0.0;
};

std::array<Eigen::Vector3d, 4> object_points(double side) {
    double h = 0.5 * side;
    return {Eigen::Vector3d{-h, h, 0.0}, Eigen::Vector3d{h, h, 0.0},
            Eigen::Vector3d{h, -h, 0.0}, Eigen::Vector3d{-h, -h, 0.0}};
}

void linearize_at(const Eigen::Matrix3d& r, const Eigen::Vector3d& t,
                  const std::array<Eigen::Vector3d, 4>& object,
                  const std::array<Vec2, 4>& pix, const CameraIntrinsics& intr,
                  Eigen::Matrix<double, 8, 6>& jac,
                  Eigen::Matrix<double, 8, 1>& res) {
    for (int i = 0; i < 4; ++i) {
        Eigen::Vector3d rp = r * object[i];
        Eigen::Vector3d q = rp + t;
        double z = q.z();
        res(2 * i) = intr.fx * q.x() / z + intr.cx - pix[i].x;
        res(2 * i + 1) = intr.fy * q.y() / z + intr.cy - pix[i].y;
        Eigen::Matrix<double, 2, 3> jproj;
        jproj << intr.fx / z, 0.0, -intr.fx * q.x() / (z * z), 0.0,
            intr.fy / z, -intr.fy * q.y() / (z * z);
        jac.block<2, 3>(2 * i, 0) = jproj;
        jac.block<2, 3>(2 * i, 3) = jproj * (-skew(rp));
    }
}

double reprojection_rms(const Eigen::Matrix3d& r, const Eigen::Vector3d& t,
                        const std::array<Eigen::Vector3d, 4>& object,
                        const std::array<Vec2, 4>& pixels,
                        const CameraIntrinsics& intr) {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        Eigen::Vector3d q = r * object[i] + t;
        double u = intr.fx * q.x() / q.z() + intr.cx;
        double v = intr.fy * q.y() / q.z() + intr.cy;
        double du = u - pixels[i].x;
        double dv = v - pixels[i].y;
        sum += du * du + dv * dv;
    }
    return std::sqrt(sum / 4.0);
}

}  // namespace

Expected<MarkerPoseEstimate, EstimateError> estimate_pose(
    const MarkerObservation& obs, const CameraIntrinsics& intr, double side) {
    if (quad_area(obs.corners) <= 1.0) return EstimateError::DegenerateCorners;

    std::array<Eigen::Vector3d, 4> object = object_points(side);

    // Work on undistorted pinhole pixels; with zero coefficients these are
    // the raw corners.
    std::array<Vec2, 4> pix;
    std::array<Vec2, 4> norm;
    for (int i = 0; i < 4; ++i) {
        Vec2 n{(obs.corners[i].x - intr.cx) / intr.fx,
               (obs.corners[i].y - intr.cy) / intr.fy};
        norm[i] = undistort_normalized(n, intr.dist);
        pix[i] = {intr.fx * norm[i].x + intr.cx, intr.fy * norm[i].y + intr.cy};
    }

    // DLT homography, marker plane -> normalized image.
    Eigen::Matrix<double, 8, 9> a = Eigen::Matrix<double, 8, 9>::Zero();
    for (int i = 0; i < 4; ++i) {
        double X = object[i].x(), Y = object[i].y();
        double x = norm[i].x, y = norm[i].y;
        a.row(2 * i) << X, Y, 1.0, 0.0, 0.0, 0.0, -x * X, -x * Y, -x;
        a.row(2 * i + 1) << 0.0, 0.0, 0.0, X, Y, 1.0, -y * X, -y * Y, -y;
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullV);
    Eigen::Matrix<double, 9, 1> hvec = svd.matrixV().col(8);
    Eigen::Matrix3d hmat;
    hmat << hvec(0), hvec(1), hvec(2), hvec(3), hvec(4), hvec(5), hvec(6),
        hvec(7), hvec(8);

    double scale = 2.0 / (hmat.col(0).norm() + hmat.col(1).norm());

    Candidate best;
    bool have = false;
    for (double sign : {1.0, -1.0}) {
        double lam = sign * scale;
        Eigen::Vector3d r1 = lam * hmat.col(0);
        Eigen::Vector3d r2 = lam * hmat.col(1);
        Eigen::Vector3d t = lam * hmat.col(2);
        Eigen::Matrix3d rough;
        rough.col(0) = r1;
        rough.col(1) = r2;
        rough.col(2) = r1.cross(r2);
        Candidate c;
        c.r = orthonormalize(rough);
        c.t = t;
        c.depths_ok = true;
        for (const auto& p : object) {
            if ((c.r * p + c.t).z() <= 0.0) {
                c.depths_ok = false;
                break;
            }
        }
        if (!c.depths_ok) continue;
        c.rms = reprojection_rms(c.r, c.t, object, pix, intr);
        if (!have || c.rms < best.rms) {
            best = c;
            have = true;
        }
    }
    if (!have) return EstimateError::NoConvergence;

    Eigen::Matrix3d r = best.r;
    Eigen::Vector3d t = best.t;
    for (int iter = 0; iter < 50; ++iter) {
        Eigen::Matrix<double, 8, 6> jac;
        Eigen::Matrix<double, 8, 1> res;
        linearize_at(r, t, object, pix, intr, jac, res);
        Eigen::Matrix<double, 6, 6> jtj = jac.transpose() * jac;
        Eigen::Matrix<double, 6, 1> delta = jtj.ldlt().solve(-jac.transpose() * res);
        t += delta.head<3>();
        r = rodrigues(delta.tail<3>()) * r;
        if (delta.norm() < 1e-10) break;
    }
    r = orthonormalize(r);

    double rms = reprojection_rms(r, t, object, pix, intr);
    if (rms > 5.0) return EstimateError::NoConvergence;

    Eigen::Quaterniond q(r);
    MarkerPoseEstimate est;
    est.pose.position = {t.x(), t.y(), t.z()};
    est.pose.orientation = Quat{q.w(), q.x(), q.y(), q.z()}.normalized();
    est.rms = rms;
    est.t = obs.t;
    return est;
}

PnpLinearization pnp_linearize(const Pose3& marker_in_camera,
                               const std::array<Vec2, 4>& pixels,
                               const CameraIntrinsics& intr, double side) {
    const Quat& q = marker_in_camera.orientation;
    Eigen::Matrix3d r =
        Eigen::Quaterniond(q.w, q.x, q.y, q.z).toRotationMatrix();
    Eigen::Vector3d t(marker_in_camera.position.x, marker_in_camera.position.y,
                      marker_in_camera.position.z);
    Eigen::Matrix<double, 8, 6> jac;
    Eigen::Matrix<double, 8, 1> res;
    linearize_at(r, t, object_points(side), pixels, intr, jac, res);
    PnpLinearization out;
    for (int i = 0; i < 8; ++i) {
        out.residual[i] = res(i);
        for (int j = 0; j < 6; ++j) out.jacobian[i][j] = jac(i, j);
    }
    return out;
}

FilteredMarkerState filter_update(const FilteredMarkerState& state,
                                  const std::optional<MarkerPoseEstimate>& est,
                                  double now, const FilterParams& params) {
    FilteredMarkerState next = state;
    if (est) {
        if (!state.has_estimate || !params.enabled) {
            next.smoothed = est->pose;
        } else {
            double a = params.alpha;
            next.smoothed.position =
                est->pose.position * a + state.smoothed.position * (1.0 - a);
            next.smoothed.orientation =
                Quat::slerp(state.smoothed.orientation, est->pose.orientation, a);
        }
        next.has_estimate = true;
        next.last_seen = now;
    }
    if (!next.has_estimate) {
        next.status = MarkerStatus::Lost;
        return next;
    }
    double age = now - next.last_seen;
    if (age < params.coast_timeout) {
        next.status = MarkerStatus::Tracking;
    } else if (age < params.lost_timeout) {
        next.status = MarkerStatus::Coasting;
    } else {
        next.status = MarkerStatus::Lost;
    }
    return next;
}

}  // namespace skytest
