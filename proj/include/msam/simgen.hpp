#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "msam/dataset.hpp"

namespace msam {

/// Synthetic scenario: waypoint paths driven with the differential-drive
/// model, landmarks scattered uniformly over the world square.
///
/// Waypoints are world-frame; robot 1's waypoints (the second path) are
/// additionally mapped through true_offset, which is how a start-pose offset
/// between the robots is expressed. Noise sigmas of exactly zero disable the
/// corresponding perturbation, so a zero NoiseModel yields bit-exact
/// noiseless data. Wheel odometry spans forward motion and heading only, so
/// sigma_odom[0] perturbs the forward displacement, sigma_odom[2] the
/// heading change, and sigma_odom[1] is unused by the generator.
struct ScenarioConfig {
    int n_landmarks = 50;
    double world_extent = 40.0;  // landmarks uniform in [-extent/2, extent/2]^2
    std::vector<std::vector<Eigen::Vector2d>> paths;
    double sensor_range = 6.0;
    NoiseModel noise;
    Se2Transform true_offset;
    std::uint64_t seed = 0;

    double step_length = 0.5;
    double max_turn = 0.3;           // radians per step
    int odom_per_measurement = 5;    // emit measurements every k-th state
    double wheel_base = 0.5;
    int max_steps = 100000;
};

struct GroundTruth {
    std::map<int, std::vector<Pose2>> poses;  // world frame
    std::vector<Landmark2> landmarks;
    double true_origin_distance = 0.0;
};

struct Scenario {
    std::vector<Dataset> datasets;  // robot_id = path index
    GroundTruth truth;
};

/// Drives each robot along its waypoints, emitting noisy wheel odometry per
/// step and noisy robot-frame measurements of landmarks within sensor_range
/// and the front half-plane. Deterministic per seed.
Scenario generate(const ScenarioConfig& cfg);

}  // namespace msam
