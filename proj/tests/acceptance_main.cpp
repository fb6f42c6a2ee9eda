// Acceptance suite: one pass/fail line per criterion. Criteria 5 and 8 drive
// the msam binary end to end; its path is argv[1].

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <sys/resource.h>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "msam/map_io.hpp"
#include "msam/simgen.hpp"
#include "msam/solver.hpp"

using namespace msam;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_msam_bin;
fs::path g_work;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

double gauss(std::mt19937_64& rng, double sigma) {
    const double u = std::max(uniform(rng, 0.0, 1.0), 1e-300);
    const double v = uniform(rng, 0.0, 1.0);
    return sigma * std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * kPi * v);
}

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& detail) {
    if (!ok) {
        throw Failure(detail);
    }
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

int run_cli(const std::string& args) {
    const std::string cmd = g_msam_bin + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) { return detail::read_file(p.string()); }

// ---------------------------------------------------------------- criterion 1

std::string jacobian_fidelity() {
    const auto start = Clock::now();
    std::mt19937_64 rng(401);
    RobotParams params;
    params.wheel_base = 0.5;
    double worst = 0.0;
    const double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        const Pose2 pose{uniform(rng, -10, 10), uniform(rng, -10, 10), uniform(rng, -kPi, kPi)};
        const Pose2 pose2{uniform(rng, -10, 10), uniform(rng, -10, 10), uniform(rng, -kPi, kPi)};
        const Landmark2 lm{0, uniform(rng, -10, 10), uniform(rng, -10, 10)};
        const WheelOdometry odom{0, uniform(rng, -1, 1), uniform(rng, -1, 1)};

        // odometry: residual derivative equals the sign-flipped constant block
        const Eigen::Matrix<double, 3, 6> expected_odo = -odometry_jacobian();
        for (int k = 0; k < 6; ++k) {
            double v[6] = {pose.x, pose.y, pose.theta, pose2.x, pose2.y, pose2.theta};
            v[k] += h;
            const Eigen::Vector3d plus = odometry_residual(
                Pose2{v[0], v[1], v[2]}, Pose2{v[3], v[4], v[5]}, odom, params, pose.theta);
            v[k] -= 2 * h;
            const Eigen::Vector3d minus = odometry_residual(
                Pose2{v[0], v[1], v[2]}, Pose2{v[3], v[4], v[5]}, odom, params, pose.theta);
            const Eigen::Vector3d fd = (plus - minus) / (2 * h);
            for (int r = 0; r < 3; ++r) {
                worst = std::max(worst, std::abs(expected_odo(r, k) - fd[r]) /
                                            std::max(1.0, std::abs(fd[r])));
            }
        }

        // measurement: analytic Jacobian against central differences
        const Eigen::Matrix<double, 2, 5> analytic = measurement_jacobian(pose, lm);
        for (int k = 0; k < 5; ++k) {
            double v[5] = {pose.x, pose.y, pose.theta, lm.x, lm.y};
            v[k] += h;
            const Eigen::Vector2d plus =
                measurement_predict(Pose2{v[0], v[1], v[2]}, Landmark2{0, v[3], v[4]});
            v[k] -= 2 * h;
            const Eigen::Vector2d minus =
                measurement_predict(Pose2{v[0], v[1], v[2]}, Landmark2{0, v[3], v[4]});
            const Eigen::Vector2d fd = (plus - minus) / (2 * h);
            for (int r = 0; r < 2; ++r) {
                worst = std::max(worst, std::abs(analytic(r, k) - fd[r]) /
                                            std::max(1.0, std::abs(fd[r])));
            }
        }
    }
    const double elapsed = seconds_since(start);
    require(worst < 1e-6, "max relative error " + num(worst));
    require(elapsed < 1.0, "took " + num(elapsed) + " s");
    return "max rel err " + num(worst) + ", " + num(elapsed) + " s";
}

// ---------------------------------------------------------------- criterion 2

ScenarioConfig loop_closure_scenario() {
    ScenarioConfig cfg;
    cfg.n_landmarks = 30;
    cfg.world_extent = 20.0;
    cfg.sensor_range = 8.0;
    cfg.seed = 403;
    cfg.step_length = 0.3;
    cfg.max_turn = 0.08;
    cfg.odom_per_measurement = 1;
    cfg.noise.sigma_odom = {0.02, 0.02, 0.01};
    cfg.noise.sigma_meas = {0.05, 0.05};
    cfg.paths = {{{-6.5, -6.5}, {6.5, -6.5}, {6.5, 6.5}, {-6.5, 6.5}, {-6.5, -6.8}}};
    return cfg;
}

double landmark_rmse(const StateVector& vars, const Eigen::VectorXd& x, const Scenario& s) {
    const Pose2& start = s.truth.poses.at(0).front();
    const Se2Transform to_local = inverse(Se2Transform{start.theta, start.x, start.y});
    double sum = 0.0;
    int count = 0;
    for (int tag : vars.landmark_tags()) {
        const Landmark2 est = vars.landmark_at(x, tag);
        const Eigen::Vector2d truth =
            apply_transform(to_local, s.truth.landmarks[static_cast<std::size_t>(tag)].position());
        sum += (est.position() - truth).squaredNorm();
        ++count;
    }
    return std::sqrt(sum / std::max(count, 1));
}

std::string loop_closure_recovery() {
    const auto start = Clock::now();
    const Scenario s = generate(loop_closure_scenario());
    const Dataset& d = s.datasets.at(0);
    require(d.pose_count() >= 180 && d.pose_count() <= 220,
            "loop has " + std::to_string(d.pose_count()) + " poses, wanted about 200");

    NoiseModel noise;
    noise.sigma_odom = {0.02, 0.02, 0.01};
    noise.sigma_meas = {0.05, 0.05};
    const FactorGraph graph = build_local_graph(d, noise);
    const Eigen::VectorXd init = initial_estimate(graph, d);
    const double rmse_dead_reckoning = landmark_rmse(graph.variables, init, s);

    const SolveResult result = optimize(graph, init, SolveConfig{});
    require(result.converged, "solver did not converge");
    const double rmse = landmark_rmse(graph.variables, result.estimate, s);
    const double elapsed = seconds_since(start);

    require(rmse < 0.15, "landmark RMSE " + num(rmse));
    require(rmse < 0.25 * rmse_dead_reckoning,
            "RMSE " + num(rmse) + " not under 25% of dead reckoning " + num(rmse_dead_reckoning));
    require(elapsed < 10.0, "took " + num(elapsed) + " s");
    return std::to_string(d.pose_count()) + " poses, RMSE " + num(rmse) + " m vs DR " +
           num(rmse_dead_reckoning) + " m, " + num(elapsed) + " s";
}

// ---------------------------------------------------------------- criterion 3

std::string linear_case_exactness() {
    std::mt19937_64 rng(403);
    FactorGraph g;
    const int n = 40;
    g.variables.add_poses(0, n);
    g.add_prior(VarId::pose(0, 0), Pose2{}, Eigen::Vector3d::Constant(1e-3));
    Dataset d;
    d.robot_id = 0;
    d.params.wheel_base = 0.5;
    for (int k = 0; k + 1 < n; ++k) {
        const WheelOdometry odom{k, 0.5 + gauss(rng, 0.02), 0.5 + gauss(rng, 0.02)};
        d.odometry.push_back(odom);
        g.add_odometry(VarId::pose(0, k), VarId::pose(0, k + 1), odom, 0.5,
                       Eigen::Vector3d::Constant(0.05));
    }
    const std::vector<Pose2> dr = dead_reckon(d);
    g.add_prior(VarId::pose(0, n - 1),
                Pose2{dr.back().x + 0.5, dr.back().y - 0.4, dr.back().theta},
                Eigen::Vector3d::Constant(0.05));

    Eigen::VectorXd init = Eigen::VectorXd::Zero(g.variables.dimension());
    for (int t = 0; t < n; ++t) {
        const Pose2& p = dr[static_cast<std::size_t>(t)];
        g.variables.set_pose(init, 0, t,
                             Pose2{p.x + uniform(rng, -1, 1), p.y + uniform(rng, -1, 1), p.theta});
    }
    const SolveResult result = optimize(g, init, SolveConfig{});
    require(result.converged, "did not converge");
    require(result.iterations == 1,
            "took " + std::to_string(result.iterations) + " iterations, expected exactly 1");
    return "converged in exactly 1 iteration, final residual " +
           num(result.residual_history.back());
}

// ---------------------------------------------------------------- criterion 4

std::string ransac_recovery() {
    const auto start = Clock::now();
    std::mt19937_64 rng(404);
    const Se2Transform truth{30.0 * kPi / 180.0, 5.0, -2.0};
    const Se2Transform truth_inv = inverse(truth);

    std::vector<Correspondence> corrs;
    for (int tag = 0; tag < 20; ++tag) {
        const Eigen::Vector2d p1{uniform(rng, -15, 15), uniform(rng, -15, 15)};
        Eigen::Vector2d p2 = apply_transform(truth_inv, p1);
        p2.x() += gauss(rng, 0.05);
        p2.y() += gauss(rng, 0.05);
        corrs.push_back({tag, p1, p2});
    }
    for (int k = 0; k < 6; ++k) {  // 30% planted outliers
        corrs[static_cast<std::size_t>(k) * 3].p2 +=
            Eigen::Vector2d{uniform(rng, 5, 10), uniform(rng, -10, -5)};
    }

    RansacConfig cfg;
    cfg.iterations = 500;
    cfg.inlier_threshold = 0.5;
    cfg.seed = 405;
    const AlignmentResult a = ransac_align(corrs, cfg);
    const AlignmentResult b = ransac_align(corrs, cfg);
    const double elapsed = seconds_since(start);

    const double rot_err = std::abs(wrap_angle(a.transform.theta - truth.theta));
    const double trans_err =
        (a.transform.translation() - truth.translation()).norm();
    require(rot_err < 0.5 * kPi / 180.0, "rotation error " + num(rot_err) + " rad");
    require(trans_err < 0.05, "translation error " + num(trans_err) + " m");
    require(a.inlier_ids.size() >= 14,
            "only " + std::to_string(a.inlier_ids.size()) + " inliers");
    require(a.transform.theta == b.transform.theta && a.transform.t_x == b.transform.t_x &&
                a.transform.t_y == b.transform.t_y && a.inlier_ids == b.inlier_ids,
            "not deterministic for a fixed seed");
    require(elapsed < 1.0, "took " + num(elapsed) + " s");
    return "rot err " + num(rot_err * 180.0 / kPi) + " deg, trans err " + num(trans_err) +
           " m, " + std::to_string(a.inlier_ids.size()) + " inliers, " + num(elapsed) + " s";
}

// ------------------------------------------------------- criteria 5, 6 and 8

void write_merge_scenario(const fs::path& path) {
    std::ofstream out(path);
    out << R"({
  "n_landmarks": 90,
  "world_extent": 52.0,
  "sensor_range": 6.0,
  "seed": 11,
  "step_length": 0.3,
  "max_turn": 0.05,
  "odom_per_measurement": 5,
  "noise": {"odom": [0.01, 0.01, 0.004], "meas": [0.04, 0.04]},
  "paths": [
    [[-19, 0], [-19, 8], [-2, 8], [-2, -8], [-19, -8], [-19, 0], [-19, 1]],
    [[19, 0], [19, 8], [-2, 8], [-2, -8], [19, -8], [19, 0], [19, 1]]
  ]
})";
}

struct PipelineFiles {
    fs::path dir;
    fs::path global;
    fs::path ground_truth;
    std::vector<fs::path> everything;
};

PipelineFiles run_pipeline(const std::string& tag) {
    PipelineFiles files;
    files.dir = g_work / tag;
    fs::create_directories(files.dir);
    const fs::path cfg = files.dir / "scenario.json";
    write_merge_scenario(cfg);

    const std::string dir = files.dir.string();
    const std::string flags = " --subsample 1 --sigma-odom 0.03,0.03,0.008 --sigma-meas 0.05,0.05";
    require(run_cli("simulate --config " + cfg.string() + " --out " + dir + "/data") == 0,
            "simulate failed");
    require(run_cli("solve --odom " + dir + "/data/robot0_odometry.csv --meas " + dir +
                    "/data/robot0_measurements.csv" + flags + " --out " + dir + "/map0.json") == 0,
            "solve robot 0 failed");
    require(run_cli("solve --odom " + dir + "/data/robot1_odometry.csv --meas " + dir +
                    "/data/robot1_measurements.csv" + flags + " --out " + dir + "/map1.json") == 0,
            "solve robot 1 failed");
    require(run_cli("align --map1 " + dir + "/map0.json --map2 " + dir +
                    "/map1.json --threshold 0.5 --iters 500 --seed 3 --out " + dir +
                    "/transform.json") == 0,
            "align failed");
    require(run_cli("merge --robot1 " + dir + "/data/robot0_odometry.csv," + dir +
                    "/data/robot0_measurements.csv --robot2 " + dir +
                    "/data/robot1_odometry.csv," + dir + "/data/robot1_measurements.csv" + flags +
                    " --prior " + dir + "/transform.json --out " + dir + "/global.json --svg " +
                    dir + "/global.svg") == 0,
            "merge failed");

    files.global = files.dir / "global.json";
    files.ground_truth = files.dir / "data" / "ground_truth.json";
    for (const char* name :
         {"data/robot0_odometry.csv", "data/robot0_measurements.csv", "data/robot1_odometry.csv",
          "data/robot1_measurements.csv", "data/ground_truth.json", "map0.json", "map1.json",
          "transform.json", "global.json", "global.svg"}) {
        files.everything.push_back(files.dir / name);
    }
    return files;
}

PipelineFiles g_pipeline_a;
PipelineFiles g_pipeline_b;

std::string merge_fidelity() {
    const auto start = Clock::now();
    g_pipeline_a = run_pipeline("pipeline_a");
    const double elapsed = seconds_since(start);

    const GlobalMap merged = load_map(g_pipeline_a.global.string());
    const GlobalMap truth = load_map(g_pipeline_a.ground_truth.string());
    require(std::abs(truth.origin_distance_m - 38.0) < 1.0,
            "scenario separation " + num(truth.origin_distance_m) + " not near 38 m");
    const double rel_err =
        std::abs(merged.origin_distance_m - truth.origin_distance_m) / truth.origin_distance_m;
    require(rel_err < 0.02, "origin distance error " + num(100 * rel_err) + "%");
    require(elapsed < 30.0, "pipeline took " + num(elapsed) + " s");
    return "true " + num(truth.origin_distance_m) + " m vs merged " +
           num(merged.origin_distance_m) + " m, error " + num(100 * rel_err) + "%, " +
           num(elapsed) + " s";
}

std::string landmark_uniqueness() {
    RobotParams params;
    params.wheel_base = 0.5;
    params.odom_subsample = 1;
    const fs::path data = g_pipeline_a.dir / "data";
    const Dataset r1 = load_dataset((data / "robot0_odometry.csv").string(),
                                    (data / "robot0_measurements.csv").string(), params, 0);
    const Dataset r2 = load_dataset((data / "robot1_odometry.csv").string(),
                                    (data / "robot1_measurements.csv").string(), params, 1);
    const auto tags1 = r1.observed_tags();
    const auto tags2 = r2.observed_tags();
    std::set<int> expected(tags1.begin(), tags1.end());
    expected.insert(tags2.begin(), tags2.end());

    const GlobalMap merged = load_map(g_pipeline_a.global.string());
    require(merged.landmarks.size() == expected.size(),
            std::to_string(merged.landmarks.size()) + " landmarks, expected " +
                std::to_string(expected.size()));
    std::set<int> seen;
    for (const auto& lm : merged.landmarks) {
        require(seen.insert(lm.tag_id).second,
                "tag " + std::to_string(lm.tag_id) + " appears twice");
        require(expected.count(lm.tag_id) == 1, "unexpected tag " + std::to_string(lm.tag_id));
    }

    // same property on an in-memory merge with a partial overlap
    const MergePlan plan = make_merge_plan(r1, r2, load_transform(
        (g_pipeline_a.dir / "transform.json").string()));
    const FactorGraph joint = build_global_graph(plan, NoiseModel{});
    require(joint.variables.landmark_tags().size() == expected.size(),
            "joint graph landmark count mismatch");
    return std::to_string(merged.landmarks.size()) + " unique tags = |tags1 u tags2| (" +
           std::to_string(tags1.size()) + " + " + std::to_string(tags2.size()) + " - shared)";
}

std::string cli_determinism() {
    require(!g_pipeline_a.everything.empty(), "first pipeline run unavailable");
    g_pipeline_b = run_pipeline("pipeline_b");
    for (std::size_t i = 0; i < g_pipeline_a.everything.size(); ++i) {
        const fs::path& a = g_pipeline_a.everything[i];
        const fs::path& b = g_pipeline_b.everything[i];
        require(slurp(a) == slurp(b),
                a.filename().string() + " differs between identical runs");
    }
    return std::to_string(g_pipeline_a.everything.size()) +
           " pipeline outputs byte-identical across two runs";
}

// ---------------------------------------------------------------- criterion 7

std::string solver_oracle_equivalence() {
    std::mt19937_64 rng(407);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t rows = 20 + rng() % 11;
        const std::size_t cols = 5 + rng() % 16;
        std::vector<std::vector<double>> a(rows, std::vector<double>(cols));
        std::vector<double> b(rows);
        std::vector<Eigen::Triplet<double>> triplets;
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                a[r][c] = uniform(rng, -1, 1);
                triplets.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c),
                                      a[r][c]);
            }
            b[r] = uniform(rng, -1, 1);
        }
        SparseSystem sys;
        sys.A.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        sys.A.setFromTriplets(triplets.begin(), triplets.end());
        sys.b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(rows));

        const Eigen::VectorXd sparse = solve_normal_equations(sys);
        const std::vector<double> oracle = test::dense_least_squares(a, b);
        for (std::size_t c = 0; c < cols; ++c) {
            worst = std::max(worst,
                             std::abs(sparse[static_cast<Eigen::Index>(c)] - oracle[c]));
        }
    }
    require(worst < 1e-8, "max deviation " + num(worst));
    return "50 systems, max deviation from dense oracle " + num(worst);
}

// ---------------------------------------------------------------- criterion 9

long peak_rss_kb() {
    std::ifstream status("/proc/self/status");
    std::string line;
    while (std::getline(status, line)) {
        if (line.rfind("VmHWM:", 0) == 0) {
            long kb = 0;
            std::sscanf(line.c_str(), "VmHWM: %ld", &kb);
            return kb;
        }
    }
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) == 0 && usage.ru_maxrss > 0) {
        return usage.ru_maxrss;  // kB on Linux
    }
    return -1;
}

std::string performance_envelope() {
    std::mt19937_64 rng(409);
    const int n_poses = 1000;
    const int n_landmarks = 50;
    const int n_measurements = 3000;

    // ground truth: a gentle arc so headings vary, landmarks alongside it
    std::vector<Pose2> truth;
    truth.emplace_back(0.0, 0.0, 0.0);
    Dataset d;
    d.robot_id = 0;
    d.params.wheel_base = 0.5;
    const double step = 0.5;
    const double turn = 2.0 * kPi / n_poses;
    for (int k = 0; k + 1 < n_poses; ++k) {
        const WheelOdometry true_odom{k, step - 0.5 * turn * 0.5, step + 0.5 * turn * 0.5};
        const Eigen::Vector3d delta = motion_delta(true_odom, truth.back().theta, d.params);
        truth.emplace_back(truth.back().x + delta.x(), truth.back().y + delta.y(),
                           truth.back().theta + delta.z());
        // perturb forward displacement and heading change, then map back to wheels
        const double f = step + gauss(rng, 0.01);
        const double t = turn + gauss(rng, 0.002);
        d.odometry.push_back({k, f - 0.5 * t * d.params.wheel_base,
                              f + 0.5 * t * d.params.wheel_base});
    }
    std::vector<Landmark2> landmarks;
    for (int j = 0; j < n_landmarks; ++j) {
        const Pose2& at = truth[static_cast<std::size_t>(j) * (n_poses / n_landmarks)];
        landmarks.push_back({j, at.x + uniform(rng, -4, 4), at.y + uniform(rng, 2, 6)});
    }
    for (int k = 0; k < n_measurements; ++k) {
        const int state = k % (n_poses - 1);
        const int tag = (state * n_landmarks / n_poses + k % 2) % n_landmarks;
        const Eigen::Vector2d z =
            measurement_predict(truth[static_cast<std::size_t>(state)],
                                landmarks[static_cast<std::size_t>(tag)]);
        d.measurements.push_back(
            {state, tag, z.x() + gauss(rng, 0.05), z.y() + gauss(rng, 0.05)});
    }
    std::sort(d.measurements.begin(), d.measurements.end(),
              [](const LandmarkMeasurement& a, const LandmarkMeasurement& b) {
                  return a.state_id < b.state_id;
              });

    NoiseModel noise;
    noise.sigma_odom = {0.02, 0.02, 0.01};
    noise.sigma_meas = {0.05, 0.05};
    const FactorGraph graph = build_local_graph(d, noise);

    Eigen::VectorXd init = initial_estimate(graph, d);
    const auto start = Clock::now();
    const SparseSystem sys = assemble(graph, init);
    const Eigen::Index n_odo = static_cast<Eigen::Index>(d.odometry.size());
    const Eigen::Index n_meas_rows = 2 * static_cast<Eigen::Index>(d.measurements.size());
    require(sys.A.nonZeros() <= 6 * n_odo + 5 * n_meas_rows + 3 * 1,
            "nnz " + std::to_string(sys.A.nonZeros()) + " above the sparsity budget");

    const SolveResult result = optimize(graph, init, SolveConfig{});
    const double elapsed = seconds_since(start);
    require(result.converged, "did not converge");
    require(elapsed < 10.0, "solve took " + num(elapsed) + " s");

    const long hwm = peak_rss_kb();
    require(hwm < 0 || hwm < 500 * 1024, "peak memory " + std::to_string(hwm) + " kB");
    return std::to_string(n_poses) + " poses, " + std::to_string(n_measurements) +
           " measurements: " + num(elapsed) + " s, nnz " + std::to_string(sys.A.nonZeros()) +
           ", peak " + (hwm < 0 ? std::string("n/a") : std::to_string(hwm / 1024) + " MB");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance_tests /path/to/msam\n");
        return 2;
    }
    g_msam_bin = argv[1];
    g_work = fs::temp_directory_path() / ("msam_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(g_work);

    struct Criterion {
        int id;
        const char* name;
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "jacobian fidelity", jacobian_fidelity},
        {2, "loop-closure recovery", loop_closure_recovery},
        {3, "linear-case exactness", linear_case_exactness},
        {4, "ransac recovery", ransac_recovery},
        {5, "merge fidelity", merge_fidelity},
        {6, "landmark uniqueness", landmark_uniqueness},
        {7, "solver oracle equivalence", solver_oracle_equivalence},
        {8, "determinism", cli_determinism},
        {9, "performance envelope", performance_envelope},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        std::string detail;
        bool ok = false;
        try {
            detail = criterion.run();
            ok = true;
        } catch (const std::exception& e) {
            detail = e.what();
        }
        std::printf("%s  %d  %-26s %s\n", ok ? "PASS" : "FAIL", criterion.id, criterion.name,
                    detail.c_str());
        std::fflush(stdout);
        if (!ok) {
            ++failures;
        }
    }

    std::error_code ec;
    fs::remove_all(g_work, ec);
    return failures == 0 ? 0 : 1;
}
