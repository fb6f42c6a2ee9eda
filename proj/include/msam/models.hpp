#pragma once

#include <Eigen/Core>

#include "msam/core.hpp"

namespace msam {

/// One interval of wheel odometry. v_l and v_r are per-interval linear
/// displacements of the left and right wheel in meters (any dt has been
/// folded in at ingestion).
struct WheelOdometry {
    int state_id = 0;
    double v_l = 0.0;
    double v_r = 0.0;
};

/// Relative landmark observation in the robot frame.
struct LandmarkMeasurement {
    int state_id = 0;
    int tag_id = 0;
    double dx = 0.0;
    double dy = 0.0;
};

/// Per-component residual standard deviations used for whitening.
struct NoiseModel {
    Eigen::Vector3d sigma_odom{0.05, 0.05, 0.02};
    Eigen::Vector2d sigma_meas{0.10, 0.10};
    Eigen::Vector3d sigma_prior{1e-3, 1e-3, 1e-3};

    void validate() const;
};

struct RobotParams {
    double wheel_base = 0.5;
    int odom_subsample = 5;
};

/// Differential-drive state change for one odometry interval, evaluated at
/// heading theta: ((v_r+v_l)/2 cos theta, (v_r+v_l)/2 sin theta, (v_r-v_l)/l).
Eigen::Vector3d motion_delta(const WheelOdometry& odom, double theta, const RobotParams& params);

/// Odometry residual z - h: predicted state change minus the observed pose
/// difference, theta component wrapped. theta_lin is the current estimate of
/// x_prev's heading.
Eigen::Vector3d odometry_residual(const Pose2& x_prev, const Pose2& x_curr,
                                  const WheelOdometry& odom, const RobotParams& params,
                                  double theta_lin);

/// Constant Jacobian of the pose-difference prediction w.r.t. (x_prev, x_curr).
Eigen::Matrix<double, 3, 6> odometry_jacobian();

/// Predicted robot-frame landmark observation.
Eigen::Vector2d measurement_predict(const Pose2& pose, const Landmark2& lm);

/// Jacobian of measurement_predict w.r.t. (r_x, r_y, r_theta, l_x, l_y).
Eigen::Matrix<double, 2, 5> measurement_jacobian(const Pose2& pose, const Landmark2& lm);

/// Back-projects a robot-frame measurement to a global landmark position.
/// Exact inverse of measurement_predict at the same pose.
Landmark2 landmark_init(const Pose2& pose, const LandmarkMeasurement& z);

/// Prior residual prior - x with the theta component wrapped. The Jacobian
/// of the residual w.r.t. x is -I3.
Eigen::Vector3d prior_residual(const Pose2& x, const Pose2& prior);

}  // namespace msam
