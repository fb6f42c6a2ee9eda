#pragma once

#include <string>
#include <vector>

#include "msam/models.hpp"

namespace msam {

/// Malformed input file; the message carries the file and line number.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Measurement that cannot be attached to any odometry state.
class SyncError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One robot's synchronized odometry and landmark measurements. After
/// ingestion odometry state_ids are dense from 0, row k moves pose k to
/// pose k+1, and every measurement state_id names an existing odometry row
/// (the pose the measurement was taken from).
struct Dataset {
    int robot_id = 0;
    std::vector<WheelOdometry> odometry;
    std::vector<LandmarkMeasurement> measurements;
    RobotParams params;

    /// Number of pose states, odometry rows + 1.
    int pose_count() const { return static_cast<int>(odometry.size()) + 1; }
    std::vector<int> observed_tags() const;  // sorted, unique
};

/// Subsamples odometry in place: consecutive groups of `subsample` rows are
/// collapsed into one interval whose wheel displacements are the group sums,
/// and measurements are re-attached to the surviving state with the greatest
/// original state_id <= theirs. States are renumbered densely from 0.
/// Raw rows must have strictly increasing state_ids.
Dataset synchronize(std::vector<WheelOdometry> raw_odometry,
                    std::vector<LandmarkMeasurement> raw_measurements,
                    const RobotParams& params, int robot_id = 0);

/// Loads odometry.csv (`state_id,v_l,v_r`) and measurements.csv
/// (`state_id,tag_id,dx,dy`), then synchronizes per params.odom_subsample.
Dataset load_dataset(const std::string& odometry_file, const std::string& measurements_file,
                     const RobotParams& params, int robot_id = 0);

/// Writes the raw CSV schema consumed by load_dataset.
void write_odometry_csv(const std::vector<WheelOdometry>& rows, const std::string& path);
void write_measurements_csv(const std::vector<LandmarkMeasurement>& rows, const std::string& path);

/// Dead-reckoned trajectory from the origin pose through motion_delta.
std::vector<Pose2> dead_reckon(const Dataset& d, const Pose2& origin = {});

}  // namespace msam
