#include "msam/models.hpp"

#include <cmath>

namespace msam {

void NoiseModel::validate() const {
    if (!(sigma_odom.minCoeff() > 0.0) || !(sigma_meas.minCoeff() > 0.0) ||
        !(sigma_prior.minCoeff() > 0.0)) {
        throw std::invalid_argument("NoiseModel: all sigmas must be positive");
    }
}

Eigen::Vector3d motion_delta(const WheelOdometry& odom, double theta, const RobotParams& params) {
    if (!(params.wheel_base > 0.0)) {
        throw std::invalid_argument("motion_delta: wheel_base must be positive");
    }
    const double forward = 0.5 * (odom.v_r + odom.v_l);
    return {forward * std::cos(theta), forward * std::sin(theta),
            (odom.v_r - odom.v_l) / params.wheel_base};
}

Eigen::Vector3d odometry_residual(const Pose2& x_prev, const Pose2& x_curr,
                                  const WheelOdometry& odom, const RobotParams& params,
                                  double theta_lin) {
    const Eigen::Vector3d predicted = motion_delta(odom, theta_lin, params);
    Eigen::Vector3d r;
    r.x() = predicted.x() - (x_curr.x - x_prev.x);
    r.y() = predicted.y() - (x_curr.y - x_prev.y);
    r.z() = wrap_angle(predicted.z() - (x_curr.theta - x_prev.theta));
    return r;
}

Eigen::Matrix<double, 3, 6> odometry_jacobian() {
    Eigen::Matrix<double, 3, 6> h;
    h << -1, 0, 0, 1, 0, 0,
          0, -1, 0, 0, 1, 0,
          0, 0, -1, 0, 0, 1;
    return h;
}

Eigen::Vector2d measurement_predict(const Pose2& pose, const Landmark2& lm) {
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    const double ex = lm.x - pose.x;
    const double ey = lm.y - pose.y;
    // Note the reflected second row; landmark_init is its exact inverse.
    return {c * ex + s * ey, s * ex - c * ey};
}

Eigen::Matrix<double, 2, 5> measurement_jacobian(const Pose2& pose, const Landmark2& lm) {
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    const double ex = lm.x - pose.x;
    const double ey = lm.y - pose.y;
    Eigen::Matrix<double, 2, 5> h;
    h << -c, -s, -s * ex + c * ey, c, s,
         -s,  c,  c * ex + s * ey, s, -c;
    return h;
}

Landmark2 landmark_init(const Pose2& pose, const LandmarkMeasurement& z) {
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    return {z.tag_id, pose.x + z.dx * c + z.dy * s, pose.y + z.dx * s - z.dy * c};
}

Eigen::Vector3d prior_residual(const Pose2& x, const Pose2& prior) {
    return {prior.x - x.x, prior.y - x.y, wrap_angle(prior.theta - x.theta)};
}

}  // namespace msam
