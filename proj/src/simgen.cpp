#include "msam/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace msam {

namespace {

// Box-Muller on explicit mt19937_64 draws; platform-stable unlike
// std::normal_distribution.
class Gaussian {
public:
    explicit Gaussian(std::mt19937_64& rng) : rng_(rng) {}

    double operator()(double sigma) {
        if (sigma == 0.0) {
            return 0.0;
        }
        if (has_spare_) {
            has_spare_ = false;
            return spare_ * sigma;
        }
        double u = 0.0;
        do {
            u = uniform();
        } while (u <= 0.0);
        const double v = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u));
        spare_ = mag * std::sin(2.0 * kPi * v);
        has_spare_ = true;
        return mag * std::cos(2.0 * kPi * v) * sigma;
    }

private:
    double uniform() {
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }

    std::mt19937_64& rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct Drive {
    std::vector<Pose2> truth;
    std::vector<WheelOdometry> odometry;
};

Drive drive_path(const std::vector<Eigen::Vector2d>& waypoints, const ScenarioConfig& cfg,
                 Gaussian& noise) {
    Drive out;
    Pose2 pose{waypoints[0].x(), waypoints[0].y(),
               std::atan2(waypoints[1].y() - waypoints[0].y(),
                          waypoints[1].x() - waypoints[0].x())};
    out.truth.push_back(pose);

    const double turn_radius = cfg.step_length / cfg.max_turn;
    std::size_t wp = 1;
    int state = 0;
    while (wp < waypoints.size() && state < cfg.max_steps) {
        const Eigen::Vector2d to_target = waypoints[wp] - pose.position();
        const double dist = to_target.norm();
        const double bearing_err =
            dist > 0.0 ? wrap_angle(std::atan2(to_target.y(), to_target.x()) - pose.theta) : 0.0;
        // Advance when the waypoint is reached, or passed so closely that the
        // turn radius would force an orbit around it.
        if (dist < 1.5 * cfg.step_length ||
            (std::abs(bearing_err) > 0.5 * kPi && dist < 2.0 * turn_radius)) {
            ++wp;
            continue;
        }
        const double heading_err = bearing_err;
        const double dtheta = std::clamp(heading_err, -cfg.max_turn, cfg.max_turn);
        const double slow = std::cos(std::min(std::abs(heading_err), 0.5 * kPi));
        const double forward = cfg.step_length * std::max(0.2, slow);

        // Invert the motion model: forward = (v_r+v_l)/2, dtheta = (v_r-v_l)/l.
        const double f_noisy = forward + noise(cfg.noise.sigma_odom[0]);
        const double t_noisy = dtheta + noise(cfg.noise.sigma_odom[2]);
        out.odometry.push_back({state, f_noisy - 0.5 * t_noisy * cfg.wheel_base,
                                f_noisy + 0.5 * t_noisy * cfg.wheel_base});

        WheelOdometry true_odom{state, forward - 0.5 * dtheta * cfg.wheel_base,
                                forward + 0.5 * dtheta * cfg.wheel_base};
        RobotParams params;
        params.wheel_base = cfg.wheel_base;
        const Eigen::Vector3d delta = motion_delta(true_odom, pose.theta, params);
        pose = Pose2{pose.x + delta.x(), pose.y + delta.y(), pose.theta + delta.z()};
        out.truth.push_back(pose);
        ++state;
    }
    return out;
}

}  // namespace

Scenario generate(const ScenarioConfig& cfg) {
    if (cfg.paths.empty()) {
        throw std::invalid_argument("generate: at least one path required");
    }
    for (const auto& path : cfg.paths) {
        if (path.size() < 2) {
            throw std::invalid_argument("generate: each path needs at least 2 waypoints");
        }
    }
    if (!(cfg.sensor_range > 0.0) || cfg.n_landmarks < 0 || !(cfg.step_length > 0.0) ||
        !(cfg.max_turn > 0.0) || cfg.odom_per_measurement < 1) {
        throw std::invalid_argument("generate: invalid scenario configuration");
    }

    std::mt19937_64 rng(cfg.seed);
    Gaussian noise(rng);

    Scenario scenario;
    const double half = 0.5 * cfg.world_extent;
    for (int tag = 0; tag < cfg.n_landmarks; ++tag) {
        const double x = (static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0) * half;
        const double y = (static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0) * half;
        scenario.truth.landmarks.push_back({tag, x, y});
    }

    for (std::size_t robot = 0; robot < cfg.paths.size(); ++robot) {
        std::vector<Eigen::Vector2d> waypoints = cfg.paths[robot];
        if (robot == 1) {
            for (auto& w : waypoints) {
                w = apply_transform(cfg.true_offset, w);
            }
        }
        Drive drive = drive_path(waypoints, cfg, noise);

        Dataset d;
        d.robot_id = static_cast<int>(robot);
        d.params.wheel_base = cfg.wheel_base;
        d.params.odom_subsample = 1;
        d.odometry = std::move(drive.odometry);
        for (int s = 0; s < static_cast<int>(d.odometry.size()); s += cfg.odom_per_measurement) {
            const Pose2& at = drive.truth[static_cast<std::size_t>(s)];
            const Eigen::Vector2d heading{std::cos(at.theta), std::sin(at.theta)};
            for (const auto& lm : scenario.truth.landmarks) {
                const Eigen::Vector2d offset = lm.position() - at.position();
                if (offset.norm() > cfg.sensor_range || heading.dot(offset) < 0.0) {
                    continue;
                }
                const Eigen::Vector2d z = measurement_predict(at, lm);
                d.measurements.push_back({s, lm.tag_id,
                                          z.x() + noise(cfg.noise.sigma_meas[0]),
                                          z.y() + noise(cfg.noise.sigma_meas[1])});
            }
        }
        scenario.truth.poses[d.robot_id] = std::move(drive.truth);
        scenario.datasets.push_back(std::move(d));
    }

    if (scenario.datasets.size() >= 2) {
        scenario.truth.true_origin_distance = (scenario.truth.poses.at(1).front().position() -
                                               scenario.truth.poses.at(0).front().position())
                                                  .norm();
    }
    return scenario;
}

}  // namespace msam
