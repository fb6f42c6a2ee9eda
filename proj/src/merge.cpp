#include "msam/merge.hpp"

#include <algorithm>

namespace msam {

MergePlan make_merge_plan(Dataset robot1, Dataset robot2, const Se2Transform& prior2) {
    if (robot1.robot_id == robot2.robot_id) {
        throw std::invalid_argument("make_merge_plan: robots must have distinct ids");
    }
    if (!std::isfinite(prior2.t_x) || !std::isfinite(prior2.t_y)) {
        throw std::invalid_argument("make_merge_plan: prior must be finite");
    }
    MergePlan plan{std::move(robot1), std::move(robot2), prior2, {}};
    const auto tags1 = plan.robot1.observed_tags();
    const auto tags2 = plan.robot2.observed_tags();
    std::set_intersection(tags1.begin(), tags1.end(), tags2.begin(), tags2.end(),
                          std::inserter(plan.shared_tags, plan.shared_tags.end()));
    return plan;
}

const std::vector<Pose2>& GlobalMap::trajectory(int robot_id) const {
    auto it = trajectories.find(robot_id);
    if (it == trajectories.end()) {
        throw std::out_of_range("GlobalMap: no trajectory for robot " + std::to_string(robot_id));
    }
    return it->second;
}

const Landmark2* GlobalMap::find_landmark(int tag_id) const {
    auto it = std::lower_bound(landmarks.begin(), landmarks.end(), tag_id,
                               [](const Landmark2& lm, int tag) { return lm.tag_id < tag; });
    return it != landmarks.end() && it->tag_id == tag_id ? &*it : nullptr;
}

FactorGraph build_global_graph(const MergePlan& plan, const NoiseModel& noise) {
    if (plan.robot1.odometry.empty() || plan.robot2.odometry.empty()) {
        throw std::invalid_argument("build_global_graph: both datasets must be non-empty");
    }
    FactorGraph graph;
    append_robot(graph, plan.robot1, noise, Pose2{});
    append_robot(graph, plan.robot2, noise,
                 Pose2{plan.prior2.t_x, plan.prior2.t_y, plan.prior2.theta});
    return graph;
}

GlobalMap solve_global(const MergePlan& plan, const NoiseModel& noise, const SolveConfig& cfg) {
    const FactorGraph graph = build_global_graph(plan, noise);

    Eigen::VectorXd init = Eigen::VectorXd::Zero(graph.variables.dimension());
    // Robot 2 first so that robot 1's back-projection wins on shared tags.
    write_initial_estimate(graph, plan.robot2,
                           Pose2{plan.prior2.t_x, plan.prior2.t_y, plan.prior2.theta}, init);
    write_initial_estimate(graph, plan.robot1, Pose2{}, init);

    const SolveResult result = optimize(graph, init, cfg);

    GlobalMap map;
    map.converged = result.converged;
    for (int rid : graph.variables.robot_ids()) {
        map.trajectories[rid] = graph.variables.trajectory(result.estimate, rid);
    }
    map.landmarks = graph.variables.landmarks(result.estimate);
    const Pose2 o1 = map.trajectory(plan.robot1.robot_id).front();
    const Pose2 o2 = map.trajectory(plan.robot2.robot_id).front();
    map.origin_distance_m = (o2.position() - o1.position()).norm();
    return map;
}

GlobalMap local_map_from_result(const FactorGraph& graph, const SolveResult& result, int robot_id) {
    GlobalMap map;
    map.converged = result.converged;
    map.trajectories[robot_id] = graph.variables.trajectory(result.estimate, robot_id);
    map.landmarks = graph.variables.landmarks(result.estimate);
    map.origin_distance_m = 0.0;
    return map;
}

}  // namespace msam
