#include "msam/core.hpp"

#include <algorithm>
#include <cmath>

namespace msam {

double wrap_angle(double a) {
    if (!std::isfinite(a)) {
        throw std::invalid_argument("wrap_angle: non-finite angle");
    }
    if (a > -kPi && a <= kPi) {
        return a;
    }
    double r = std::fmod(a + kPi, 2.0 * kPi);
    if (r <= 0.0) {
        r += 2.0 * kPi;
    }
    return r - kPi;
}

Eigen::Matrix2d Se2Transform::rotation() const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::Matrix2d r;
    r << c, -s, s, c;
    return r;
}

Eigen::Vector2d apply_transform(const Se2Transform& t, const Eigen::Vector2d& p) {
    return t.rotation() * p + t.translation();
}

Pose2 apply_transform(const Se2Transform& t, const Pose2& p) {
    const Eigen::Vector2d q = apply_transform(t, p.position());
    return {q.x(), q.y(), p.theta + t.theta};
}

Se2Transform compose(const Se2Transform& a, const Se2Transform& b) {
    const Eigen::Vector2d t = a.rotation() * b.translation() + a.translation();
    return {a.theta + b.theta, t.x(), t.y()};
}

Se2Transform inverse(const Se2Transform& t) {
    const Eigen::Vector2d ti = -(t.rotation().transpose() * t.translation());
    return {-t.theta, ti.x(), ti.y()};
}

std::string to_string(const VarId& id) {
    if (id.kind == VarId::Kind::pose) {
        return "pose(robot " + std::to_string(id.robot_id) + ", t " + std::to_string(id.index) + ")";
    }
    return "landmark(tag " + std::to_string(id.index) + ")";
}

void StateVector::add_pose(int robot_id, int timestep) {
    int& count = poses_per_robot_[robot_id];
    if (timestep != count) {
        throw std::invalid_argument("StateVector: pose timesteps of robot " +
                                    std::to_string(robot_id) + " must be consecutive, expected " +
                                    std::to_string(count) + ", got " + std::to_string(timestep));
    }
    ++count;
}

void StateVector::add_poses(int robot_id, int count) {
    for (int t = 0; t < count; ++t) {
        add_pose(robot_id, pose_count(robot_id));
    }
}

void StateVector::add_landmark(int tag_id) {
    if (tag_id < 0) {
        throw std::invalid_argument("StateVector: negative tag_id");
    }
    auto it = std::lower_bound(tags_.begin(), tags_.end(), tag_id);
    if (it == tags_.end() || *it != tag_id) {
        tags_.insert(it, tag_id);
    }
}

bool StateVector::has(const VarId& id) const {
    if (id.kind == VarId::Kind::pose) {
        auto it = poses_per_robot_.find(id.robot_id);
        return it != poses_per_robot_.end() && id.index >= 0 && id.index < it->second;
    }
    return std::binary_search(tags_.begin(), tags_.end(), id.index);
}

Eigen::Index StateVector::pose_block_start(int robot_id) const {
    Eigen::Index start = 0;
    for (const auto& [rid, count] : poses_per_robot_) {
        if (rid == robot_id) {
            return start;
        }
        start += 3 * static_cast<Eigen::Index>(count);
    }
    throw std::out_of_range("StateVector: unknown robot " + std::to_string(robot_id));
}

Eigen::Index StateVector::total_pose_dim() const {
    Eigen::Index dim = 0;
    for (const auto& [rid, count] : poses_per_robot_) {
        dim += 3 * static_cast<Eigen::Index>(count);
    }
    return dim;
}

Eigen::Index StateVector::index_of(const VarId& id) const {
    if (!has(id)) {
        throw std::out_of_range("StateVector: unregistered variable " + to_string(id));
    }
    if (id.kind == VarId::Kind::pose) {
        return pose_block_start(id.robot_id) + 3 * static_cast<Eigen::Index>(id.index);
    }
    const auto it = std::lower_bound(tags_.begin(), tags_.end(), id.index);
    return total_pose_dim() + 2 * static_cast<Eigen::Index>(it - tags_.begin());
}

VarId StateVector::var_at(Eigen::Index offset) const {
    if (offset < 0 || offset >= dimension()) {
        throw std::out_of_range("StateVector: offset out of range");
    }
    Eigen::Index start = 0;
    for (const auto& [rid, count] : poses_per_robot_) {
        const Eigen::Index block = 3 * static_cast<Eigen::Index>(count);
        if (offset < start + block) {
            return VarId::pose(rid, static_cast<int>((offset - start) / 3));
        }
        start += block;
    }
    return VarId::landmark(tags_[static_cast<std::size_t>((offset - start) / 2)]);
}

Eigen::Index StateVector::dimension() const {
    return total_pose_dim() + 2 * static_cast<Eigen::Index>(tags_.size());
}

int StateVector::pose_count(int robot_id) const {
    auto it = poses_per_robot_.find(robot_id);
    return it == poses_per_robot_.end() ? 0 : it->second;
}

std::vector<int> StateVector::robot_ids() const {
    std::vector<int> ids;
    ids.reserve(poses_per_robot_.size());
    for (const auto& [rid, count] : poses_per_robot_) {
        ids.push_back(rid);
    }
    return ids;
}

Pose2 StateVector::pose_at(const Eigen::VectorXd& x, int robot_id, int timestep) const {
    const Eigen::Index i = index_of(VarId::pose(robot_id, timestep));
    return {x[i], x[i + 1], x[i + 2]};
}

Landmark2 StateVector::landmark_at(const Eigen::VectorXd& x, int tag_id) const {
    const Eigen::Index i = index_of(VarId::landmark(tag_id));
    return {tag_id, x[i], x[i + 1]};
}

void StateVector::set_pose(Eigen::VectorXd& x, int robot_id, int timestep, const Pose2& p) const {
    const Eigen::Index i = index_of(VarId::pose(robot_id, timestep));
    x[i] = p.x;
    x[i + 1] = p.y;
    x[i + 2] = p.theta;
}

void StateVector::set_landmark(Eigen::VectorXd& x, int tag_id, const Eigen::Vector2d& p) const {
    const Eigen::Index i = index_of(VarId::landmark(tag_id));
    x[i] = p.x();
    x[i + 1] = p.y();
}

void StateVector::wrap_thetas(Eigen::VectorXd& x) const {
    Eigen::Index start = 0;
    for (const auto& [rid, count] : poses_per_robot_) {
        for (int t = 0; t < count; ++t) {
            x[start + 3 * t + 2] = wrap_angle(x[start + 3 * t + 2]);
        }
        start += 3 * static_cast<Eigen::Index>(count);
    }
}

std::vector<Pose2> StateVector::trajectory(const Eigen::VectorXd& x, int robot_id) const {
    std::vector<Pose2> poses;
    const int n = pose_count(robot_id);
    poses.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        poses.push_back(pose_at(x, robot_id, t));
    }
    return poses;
}

std::vector<Landmark2> StateVector::landmarks(const Eigen::VectorXd& x) const {
    std::vector<Landmark2> out;
    out.reserve(tags_.size());
    for (int tag : tags_) {
        out.push_back(landmark_at(x, tag));
    }
    return out;
}

}  // namespace msam
