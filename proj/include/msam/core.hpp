#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace msam {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Wraps an angle to (-pi, pi].
/// Throws std::invalid_argument on non-finite input.
double wrap_angle(double a);

/// Planar robot pose. theta is stored wrapped to (-pi, pi].
struct Pose2 {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Pose2() = default;
    Pose2(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

    Eigen::Vector2d position() const { return {x, y}; }
};

/// Planar landmark with its AprilTag ID. IDs are unique within one map.
struct Landmark2 {
    int tag_id = 0;
    double x = 0.0;
    double y = 0.0;

    Landmark2() = default;
    Landmark2(int tag, double x_, double y_) : tag_id(tag), x(x_), y(y_) {}

    Eigen::Vector2d position() const { return {x, y}; }
};

/// Rigid planar transform (theta, t_x, t_y), theta wrapped to (-pi, pi].
struct Se2Transform {
    double theta = 0.0;
    double t_x = 0.0;
    double t_y = 0.0;

    Se2Transform() = default;
    Se2Transform(double theta_, double tx, double ty) : theta(wrap_angle(theta_)), t_x(tx), t_y(ty) {}

    Eigen::Matrix2d rotation() const;
    Eigen::Vector2d translation() const { return {t_x, t_y}; }

    static Se2Transform identity() { return {}; }
};

/// R(theta) * p + t
Eigen::Vector2d apply_transform(const Se2Transform& t, const Eigen::Vector2d& p);

/// Applies a transform to a full pose: position is mapped, heading is shifted.
Pose2 apply_transform(const Se2Transform& t, const Pose2& p);

Se2Transform compose(const Se2Transform& a, const Se2Transform& b);
Se2Transform inverse(const Se2Transform& t);

/// Identifies one variable block in the state vector: a robot pose at a
/// timestep or a landmark keyed by tag ID.
struct VarId {
    enum class Kind { pose, landmark };

    Kind kind = Kind::pose;
    int robot_id = 0;  // poses only
    int index = 0;     // timestep for poses, tag_id for landmarks

    static VarId pose(int robot_id, int timestep) { return {Kind::pose, robot_id, timestep}; }
    static VarId landmark(int tag_id) { return {Kind::landmark, 0, tag_id}; }

    friend bool operator==(const VarId&, const VarId&) = default;
    friend auto operator<=>(const VarId&, const VarId&) = default;
};

std::string to_string(const VarId& id);

/// Layout of the flat state vector: per-robot pose blocks (robot IDs
/// ascending, 3 scalars per pose) followed by landmark blocks (tag IDs
/// ascending, 2 scalars each). Offsets are a function of the registered
/// variable set only, so two layouts built in different orders agree.
class StateVector {
public:
    /// Registers the next pose of a robot. Timesteps must arrive
    /// consecutively starting at 0.
    void add_pose(int robot_id, int timestep);
    void add_poses(int robot_id, int count);
    /// Registers a landmark. Re-registering an existing tag is a no-op,
    /// which is what unifies shared landmarks across robots.
    void add_landmark(int tag_id);

    bool has(const VarId& id) const;
    /// Scalar offset of a variable block. Throws std::out_of_range for
    /// unregistered variables.
    Eigen::Index index_of(const VarId& id) const;
    /// Reverse lookup: the variable whose block covers a scalar offset.
    VarId var_at(Eigen::Index offset) const;

    Eigen::Index dimension() const;
    int pose_count(int robot_id) const;
    std::vector<int> robot_ids() const;
    const std::vector<int>& landmark_tags() const { return tags_; }

    // Accessors into a value vector laid out by this layout.
    Pose2 pose_at(const Eigen::VectorXd& x, int robot_id, int timestep) const;
    Landmark2 landmark_at(const Eigen::VectorXd& x, int tag_id) const;
    void set_pose(Eigen::VectorXd& x, int robot_id, int timestep, const Pose2& p) const;
    void set_landmark(Eigen::VectorXd& x, int tag_id, const Eigen::Vector2d& p) const;
    /// Wraps every pose theta entry of a value vector in place.
    void wrap_thetas(Eigen::VectorXd& x) const;

    std::vector<Pose2> trajectory(const Eigen::VectorXd& x, int robot_id) const;
    std::vector<Landmark2> landmarks(const Eigen::VectorXd& x) const;

private:
    Eigen::Index pose_block_start(int robot_id) const;
    Eigen::Index total_pose_dim() const;

    std::map<int, int> poses_per_robot_;
    std::vector<int> tags_;  // sorted, unique
};

}  // namespace msam
