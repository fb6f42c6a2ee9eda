#pragma once

#include <map>
#include <set>
#include <vector>

#include "msam/dataset.hpp"
#include "msam/solver.hpp"

namespace msam {

/// Inputs of one pairwise merge: robot 1 owns the global frame, prior2 places
/// robot 2's origin in it.
struct MergePlan {
    Dataset robot1;
    Dataset robot2;
    Se2Transform prior2;
    std::set<int> shared_tags;
};

/// Fills shared_tags with the intersection of the observed tag sets.
MergePlan make_merge_plan(Dataset robot1, Dataset robot2, const Se2Transform& prior2);

/// A solved map: per-robot trajectories plus one entry per landmark tag.
struct GlobalMap {
    std::map<int, std::vector<Pose2>> trajectories;
    std::vector<Landmark2> landmarks;  // ascending tag_id, each tag once
    double origin_distance_m = 0.0;
    bool converged = true;

    const std::vector<Pose2>& trajectory(int robot_id) const;
    const Landmark2* find_landmark(int tag_id) const;
};

/// Joint two-robot graph: robot 1 anchored at the origin, robot 2's origin
/// held by a prior at prior2, shared tags as single landmark variables.
/// Measurements stay in their robot-centric frames.
FactorGraph build_global_graph(const MergePlan& plan, const NoiseModel& noise);

/// Builds and optimizes the joint graph. Robot 1 initializes by dead
/// reckoning, robot 2 by dead reckoning through prior2; shared landmarks
/// start from robot 1's back-projection when it observed them.
GlobalMap solve_global(const MergePlan& plan, const NoiseModel& noise, const SolveConfig& cfg);

/// Packs a single-robot solution into the same map document shape.
GlobalMap local_map_from_result(const FactorGraph& graph, const SolveResult& result, int robot_id);

}  // namespace msam
