#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "msam/map_io.hpp"
#include "msam/simgen.hpp"

namespace fs = std::filesystem;
using namespace msam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitAlignment = 4;

struct SimulateArgs {
    std::string config;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

struct SolveArgs {
    std::string odom;
    std::string meas;
    std::string out;
    std::string svg;
    double wheel_base = 0.5;
    int subsample = 5;
    int max_iterations = 100;
    double rel_tol = 1e-6;
    std::vector<double> sigma_odom{0.05, 0.05, 0.02};
    std::vector<double> sigma_meas{0.10, 0.10};
    std::vector<double> sigma_prior{1e-3, 1e-3, 1e-3};
};

struct AlignArgs {
    std::string map1;
    std::string map2;
    std::string out;
    double threshold = 0.5;
    int iterations = 500;
    double min_pair_separation = 0.2;
    std::uint64_t seed = 0;
};

struct MergeArgs {
    std::string robot1;
    std::string robot2;
    std::string prior;
    std::string out;
    std::string svg;
    SolveArgs solver;  // shared noise/solver flags
};

NoiseModel noise_from(const SolveArgs& a) {
    if (a.sigma_odom.size() != 3 || a.sigma_meas.size() != 2 || a.sigma_prior.size() != 3) {
        throw std::invalid_argument("sigma flags need 3,2,3 comma-separated values");
    }
    NoiseModel noise;
    noise.sigma_odom = Eigen::Vector3d(a.sigma_odom.data());
    noise.sigma_meas = Eigen::Vector2d(a.sigma_meas.data());
    noise.sigma_prior = Eigen::Vector3d(a.sigma_prior.data());
    noise.validate();
    return noise;
}

SolveConfig solve_config_from(const SolveArgs& a) {
    SolveConfig cfg;
    cfg.max_iterations = a.max_iterations;
    cfg.rel_tol = a.rel_tol;
    cfg.validate();
    return cfg;
}

ScenarioConfig parse_scenario(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(detail::read_file(path));
    } catch (const std::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    ScenarioConfig cfg;
    try {
        cfg.n_landmarks = doc.value("n_landmarks", cfg.n_landmarks);
        cfg.world_extent = doc.value("world_extent", cfg.world_extent);
        cfg.sensor_range = doc.value("sensor_range", cfg.sensor_range);
        cfg.seed = doc.value("seed", cfg.seed);
        cfg.step_length = doc.value("step_length", cfg.step_length);
        cfg.max_turn = doc.value("max_turn", cfg.max_turn);
        cfg.odom_per_measurement = doc.value("odom_per_measurement", cfg.odom_per_measurement);
        cfg.wheel_base = doc.value("wheel_base", cfg.wheel_base);
        if (doc.contains("noise")) {
            const auto& n = doc["noise"];
            if (n.contains("odom")) {
                for (int i = 0; i < 3; ++i) cfg.noise.sigma_odom[i] = n["odom"].at(i).get<double>();
            }
            if (n.contains("meas")) {
                for (int i = 0; i < 2; ++i) cfg.noise.sigma_meas[i] = n["meas"].at(i).get<double>();
            }
            if (n.contains("prior")) {
                for (int i = 0; i < 3; ++i) cfg.noise.sigma_prior[i] = n["prior"].at(i).get<double>();
            }
        }
        if (doc.contains("true_offset")) {
            const auto& t = doc["true_offset"];
            cfg.true_offset = Se2Transform(t.value("theta", 0.0), t.value("t_x", 0.0),
                                           t.value("t_y", 0.0));
        }
        if (!doc.contains("paths")) {
            throw std::invalid_argument(path + ": missing \"paths\"");
        }
        for (const auto& p : doc["paths"]) {
            std::vector<Eigen::Vector2d> waypoints;
            for (const auto& w : p) {
                waypoints.emplace_back(w.at(0).get<double>(), w.at(1).get<double>());
            }
            cfg.paths.push_back(std::move(waypoints));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return cfg;
}

int cmd_simulate(const SimulateArgs& args) {
    ScenarioConfig cfg = parse_scenario(args.config);
    if (args.seed_set) {
        cfg.seed = args.seed;
    }
    const Scenario scenario = generate(cfg);

    fs::create_directories(args.out_dir);
    for (const auto& d : scenario.datasets) {
        const std::string stem = args.out_dir + "/robot" + std::to_string(d.robot_id);
        write_odometry_csv(d.odometry, stem + "_odometry.csv");
        write_measurements_csv(d.measurements, stem + "_measurements.csv");
    }
    GlobalMap truth;
    truth.trajectories = scenario.truth.poses;
    truth.landmarks = scenario.truth.landmarks;
    truth.origin_distance_m = scenario.truth.true_origin_distance;
    export_map(truth, args.out_dir + "/ground_truth.json");
    std::cout << "robots " << scenario.datasets.size() << "\n"
              << "landmarks " << scenario.truth.landmarks.size() << "\n";
    return kExitOk;
}

Dataset load_with(const SolveArgs& a, const std::string& odom, const std::string& meas,
                  int robot_id) {
    RobotParams params;
    params.wheel_base = a.wheel_base;
    params.odom_subsample = a.subsample;
    return load_dataset(odom, meas, params, robot_id);
}

void write_solution(const GlobalMap& map, const std::string& out, const std::string& svg) {
    export_map(map, out);
    if (!svg.empty()) {
        std::vector<MapLayer> layers;
        for (const auto& [rid, poses] : map.trajectories) {
            MapLayer layer;
            layer.label = "robot " + std::to_string(rid);
            layer.trajectory = poses;
            if (layers.empty()) {
                layer.landmarks = map.landmarks;
            }
            layers.push_back(std::move(layer));
        }
        render_svg(layers, svg);
    }
}

int cmd_solve(const SolveArgs& args) {
    const Dataset d = load_with(args, args.odom, args.meas, 0);
    const NoiseModel noise = noise_from(args);
    const FactorGraph graph = build_local_graph(d, noise);
    const Eigen::VectorXd init = initial_estimate(graph, d);

    SolveResult result;
    try {
        result = optimize(graph, init, solve_config_from(args));
    } catch (const NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        GlobalMap map = local_map_from_result(graph, e.best(), d.robot_id);
        map.converged = false;
        write_solution(map, args.out, args.svg);
        return kExitNonConvergence;
    }

    const GlobalMap map = local_map_from_result(graph, result, d.robot_id);
    write_solution(map, args.out, args.svg);
    std::printf("iterations %d\n", result.iterations);
    std::printf("residual %.17g\n", result.residual_history.back());
    std::printf("converged %s\n", result.converged ? "true" : "false");
    return result.converged ? kExitOk : kExitNonConvergence;
}

int cmd_align(const AlignArgs& args) {
    const GlobalMap map1 = load_map(args.map1);
    const GlobalMap map2 = load_map(args.map2);
    const auto corrs = find_correspondences(map1.landmarks, map2.landmarks);

    RansacConfig cfg;
    cfg.iterations = args.iterations;
    cfg.inlier_threshold = args.threshold;
    cfg.min_pair_separation = args.min_pair_separation;
    cfg.seed = args.seed;
    const AlignmentResult result = ransac_align(corrs, cfg);

    save_transform(result, args.out);
    std::printf("correspondences %zu\n", corrs.size());
    std::printf("inliers %zu\n", result.inlier_ids.size());
    std::printf("theta %.17g\n", result.transform.theta);
    std::printf("t_x %.17g\n", result.transform.t_x);
    std::printf("t_y %.17g\n", result.transform.t_y);
    return kExitOk;
}

std::pair<std::string, std::string> split_pair(const std::string& arg, const char* flag) {
    const auto comma = arg.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == arg.size()) {
        throw std::invalid_argument(std::string(flag) + " expects ODOMETRY_CSV,MEASUREMENTS_CSV");
    }
    return {arg.substr(0, comma), arg.substr(comma + 1)};
}

int cmd_merge(const MergeArgs& args) {
    const auto [odom1, meas1] = split_pair(args.robot1, "--robot1");
    const auto [odom2, meas2] = split_pair(args.robot2, "--robot2");
    Dataset r1 = load_with(args.solver, odom1, meas1, 0);
    Dataset r2 = load_with(args.solver, odom2, meas2, 1);
    const Se2Transform prior2 = load_transform(args.prior);

    const MergePlan plan = make_merge_plan(std::move(r1), std::move(r2), prior2);
    const NoiseModel noise = noise_from(args.solver);
    const GlobalMap map = solve_global(plan, noise, solve_config_from(args.solver));

    write_solution(map, args.out, args.svg);
    std::printf("origin_distance_m %.17g\n", map.origin_distance_m);
    std::printf("landmarks %zu\n", map.landmarks.size());
    std::printf("converged %s\n", map.converged ? "true" : "false");
    return map.converged ? kExitOk : kExitNonConvergence;
}

void add_solver_flags(CLI::App* cmd, SolveArgs& args) {
    cmd->add_option("--wheel-base", args.wheel_base, "wheel base length in meters");
    cmd->add_option("--subsample", args.subsample, "odometry subsampling factor");
    cmd->add_option("--max-iters", args.max_iterations, "Gauss-Newton iteration cap");
    cmd->add_option("--rel-tol", args.rel_tol, "relative residual decrease tolerance");
    cmd->add_option("--sigma-odom", args.sigma_odom, "odometry sigmas x,y,theta")->delimiter(',');
    cmd->add_option("--sigma-meas", args.sigma_meas, "measurement sigmas x,y")->delimiter(',');
    cmd->add_option("--sigma-prior", args.sigma_prior, "prior sigmas x,y,theta")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"msam: multi-robot smoothing and mapping"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic two-robot dataset");
    sim->add_option("--config", sim_args.config, "scenario JSON")->required();
    sim->add_option("--seed", sim_args.seed, "override the scenario seed")
        ->each([&](const std::string&) { sim_args.seed_set = true; });
    sim->add_option("--out", sim_args.out_dir, "output directory")->required();

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "solve one robot's local map");
    solve->add_option("--odom", solve_args.odom, "odometry CSV")->required();
    solve->add_option("--meas", solve_args.meas, "measurements CSV")->required();
    solve->add_option("--out", solve_args.out, "output map JSON")->required();
    solve->add_option("--svg", solve_args.svg, "also render the map to SVG");
    add_solver_flags(solve, solve_args);

    AlignArgs align_args;
    CLI::App* align = app.add_subcommand("align", "estimate the map-2 to map-1 transform");
    align->add_option("--map1", align_args.map1, "map JSON of robot 1")->required();
    align->add_option("--map2", align_args.map2, "map JSON of robot 2")->required();
    align->add_option("--threshold", align_args.threshold, "inlier distance in meters");
    align->add_option("--iters", align_args.iterations, "RANSAC iterations");
    align->add_option("--min-separation", align_args.min_pair_separation,
                      "minimum sample pair separation");
    align->add_option("--seed", align_args.seed, "RANSAC seed");
    align->add_option("--out", align_args.out, "output transform JSON")->required();

    MergeArgs merge_args;
    CLI::App* merge = app.add_subcommand("merge", "solve the joint two-robot map");
    merge->add_option("--robot1", merge_args.robot1, "odometry.csv,measurements.csv")->required();
    merge->add_option("--robot2", merge_args.robot2, "odometry.csv,measurements.csv")->required();
    merge->add_option("--prior", merge_args.prior, "robot 2 origin prior JSON")->required();
    merge->add_option("--out", merge_args.out, "output global map JSON")->required();
    merge->add_option("--svg", merge_args.svg, "also render the map to SVG");
    add_solver_flags(merge, merge_args.solver);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(sim_args);
        }
        if (solve->parsed()) {
            return cmd_solve(solve_args);
        }
        if (align->parsed()) {
            return cmd_align(align_args);
        }
        return cmd_merge(merge_args);
    } catch (const AlignmentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAlignment;
    } catch (const NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SyncError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
