#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "msam/dataset.hpp"
#include "msam/models.hpp"

namespace msam {

struct PriorFactor {
    VarId var;
    Pose2 value;
    Eigen::Vector3d sigma;
};

struct OdometryFactor {
    VarId prev;
    VarId curr;
    WheelOdometry odom;
    double wheel_base;
    Eigen::Vector3d sigma;
};

struct MeasurementFactor {
    VarId pose;
    VarId landmark;
    LandmarkMeasurement z;
    Eigen::Vector2d sigma;
};

using Factor = std::variant<PriorFactor, OdometryFactor, MeasurementFactor>;

/// Residual blocks over a flat state vector. Factors may only reference
/// variables registered in `variables`; a connected graph needs at least one
/// prior to fix the gauge.
struct FactorGraph {
    StateVector variables;
    std::vector<Factor> factors;

    void add_prior(const VarId& var, const Pose2& value, const Eigen::Vector3d& sigma);
    void add_odometry(const VarId& prev, const VarId& curr, const WheelOdometry& odom,
                      double wheel_base, const Eigen::Vector3d& sigma);
    void add_measurement(const VarId& pose, const VarId& landmark, const LandmarkMeasurement& z,
                         const Eigen::Vector2d& sigma);

    Eigen::Index residual_dimension() const;
};

/// Whitened linearization A x = b. Row order follows factor order; each
/// odometry row has at most 6 nonzeros, measurement rows 5, prior rows 3.
struct SparseSystem {
    Eigen::SparseMatrix<double, Eigen::RowMajor> A;
    Eigen::VectorXd b;
};

struct SolveConfig {
    int max_iterations = 100;
    double rel_tol = 1e-6;
    double damping_init = 0.0;  // 0 = pure Gauss-Newton first
    double damping_factor = 10.0;

    void validate() const;
};

struct SolveResult {
    Eigen::VectorXd estimate;
    int iterations = 0;
    std::vector<double> residual_history;  // squared whitened residual per accepted step
    bool converged = false;
};

/// Normal equations became numerically or structurally rank deficient.
class SingularSystemError : public std::runtime_error {
public:
    SingularSystemError(std::string message, std::optional<Eigen::Index> column)
        : std::runtime_error(std::move(message)), column_(column) {}

    std::optional<Eigen::Index> column() const { return column_; }

private:
    std::optional<Eigen::Index> column_;
};

/// Damping exceeded its ceiling without producing a non-increasing step.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(std::string message, SolveResult best)
        : std::runtime_error(std::move(message)), best_(std::move(best)) {}

    const SolveResult& best() const { return best_; }

private:
    SolveResult best_;
};

/// Linearizes every factor at x0 into a whitened sparse system.
SparseSystem assemble(const FactorGraph& graph, const Eigen::VectorXd& x0);

/// Squared whitened residual norm at x.
double residual_norm2(const FactorGraph& graph, const Eigen::VectorXd& x);

/// Least-squares step via sparse Cholesky of (A^T A + lambda I).
Eigen::VectorXd solve_normal_equations(const SparseSystem& sys, double lambda = 0.0);

/// Damped Gauss-Newton over the graph. Steps that increase the residual are
/// retried with growing Levenberg damping; throws NonConvergenceError once
/// lambda exceeds 1e8.
SolveResult optimize(const FactorGraph& graph, const Eigen::VectorXd& init, const SolveConfig& cfg);

/// Appends one robot's variables and factors: an origin prior (sigma_prior),
/// odometry factors per interval, and one measurement factor per observation.
void append_robot(FactorGraph& graph, const Dataset& d, const NoiseModel& noise,
                  const Pose2& origin_prior);

/// Single-robot graph anchored at the origin.
FactorGraph build_local_graph(const Dataset& d, const NoiseModel& noise);

/// Dead-reckoned poses from `origin` plus landmarks back-projected from each
/// tag's first measurement, written into a vector laid out by graph.variables.
/// Only this dataset's blocks are touched; later calls win on shared tags.
void write_initial_estimate(const FactorGraph& graph, const Dataset& d, const Pose2& origin,
                            Eigen::VectorXd& x);

/// Initial estimate for a single-robot graph.
Eigen::VectorXd initial_estimate(const FactorGraph& graph, const Dataset& d);

}  // namespace msam
