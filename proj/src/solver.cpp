#include "msam/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/SparseCholesky>

namespace msam {

namespace {

// Absolute floor for the relative-decrease denominator; squared whitened
// residuals below this are numerically zero.
constexpr double kCostFloor = 1e-12;

void check_sigma(const Eigen::Ref<const Eigen::VectorXd>& sigma, const char* what) {
    if (!(sigma.minCoeff() > 0.0)) {
        throw std::invalid_argument(std::string(what) + ": sigma components must be positive");
    }
}

Pose2 pose_from(const Eigen::VectorXd& x, Eigen::Index i) {
    return {x[i], x[i + 1], x[i + 2]};
}

}  // namespace

void FactorGraph::add_prior(const VarId& var, const Pose2& value, const Eigen::Vector3d& sigma) {
    check_sigma(sigma, "add_prior");
    if (!variables.has(var) || var.kind != VarId::Kind::pose) {
        throw std::invalid_argument("add_prior: unregistered pose variable " + to_string(var));
    }
    factors.push_back(PriorFactor{var, value, sigma});
}

void FactorGraph::add_odometry(const VarId& prev, const VarId& curr, const WheelOdometry& odom,
                               double wheel_base, const Eigen::Vector3d& sigma) {
    check_sigma(sigma, "add_odometry");
    if (!(wheel_base > 0.0)) {
        throw std::invalid_argument("add_odometry: wheel_base must be positive");
    }
    for (const VarId* v : {&prev, &curr}) {
        if (!variables.has(*v) || v->kind != VarId::Kind::pose) {
            throw std::invalid_argument("add_odometry: unregistered pose variable " + to_string(*v));
        }
    }
    factors.push_back(OdometryFactor{prev, curr, odom, wheel_base, sigma});
}

void FactorGraph::add_measurement(const VarId& pose, const VarId& landmark,
                                  const LandmarkMeasurement& z, const Eigen::Vector2d& sigma) {
    check_sigma(sigma, "add_measurement");
    if (!variables.has(pose) || pose.kind != VarId::Kind::pose) {
        throw std::invalid_argument("add_measurement: unregistered pose variable " + to_string(pose));
    }
    if (!variables.has(landmark) || landmark.kind != VarId::Kind::landmark) {
        throw std::invalid_argument("add_measurement: unregistered landmark " + to_string(landmark));
    }
    factors.push_back(MeasurementFactor{pose, landmark, z, sigma});
}

Eigen::Index FactorGraph::residual_dimension() const {
    Eigen::Index rows = 0;
    for (const Factor& f : factors) {
        rows += std::holds_alternative<MeasurementFactor>(f) ? 2 : 3;
    }
    return rows;
}

void SolveConfig::validate() const {
    if (max_iterations < 1 || !(rel_tol > 0.0) || damping_init < 0.0 || !(damping_factor > 1.0)) {
        throw std::invalid_argument("SolveConfig: invalid configuration");
    }
}

SparseSystem assemble(const FactorGraph& graph, const Eigen::VectorXd& x0) {
    if (x0.size() != graph.variables.dimension()) {
        throw std::invalid_argument("assemble: estimate dimension does not match graph layout");
    }

    SparseSystem sys;
    const Eigen::Index rows = graph.residual_dimension();
    sys.b.resize(rows);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(rows) * 3);

    Eigen::Index row = 0;
    for (const Factor& f : graph.factors) {
        if (const auto* pf = std::get_if<PriorFactor>(&f)) {
            const Eigen::Index col = graph.variables.index_of(pf->var);
            const Eigen::Vector3d r = prior_residual(pose_from(x0, col), pf->value);
            for (int k = 0; k < 3; ++k) {
                const double w = 1.0 / pf->sigma[k];
                triplets.emplace_back(row + k, col + k, w);
                sys.b[row + k] = r[k] * w;
            }
            row += 3;
        } else if (const auto* of = std::get_if<OdometryFactor>(&f)) {
            const Eigen::Index ci = graph.variables.index_of(of->prev);
            const Eigen::Index cj = graph.variables.index_of(of->curr);
            const Pose2 xp = pose_from(x0, ci);
            const Pose2 xc = pose_from(x0, cj);
            RobotParams params;
            params.wheel_base = of->wheel_base;
            const Eigen::Vector3d r = odometry_residual(xp, xc, of->odom, params, xp.theta);
            for (int k = 0; k < 3; ++k) {
                const double w = 1.0 / of->sigma[k];
                triplets.emplace_back(row + k, ci + k, -w);
                triplets.emplace_back(row + k, cj + k, w);
                sys.b[row + k] = r[k] * w;
            }
            row += 3;
        } else {
            const auto& mf = std::get<MeasurementFactor>(f);
            const Eigen::Index cp = graph.variables.index_of(mf.pose);
            const Eigen::Index cl = graph.variables.index_of(mf.landmark);
            const Pose2 xp = pose_from(x0, cp);
            const Landmark2 lm{mf.z.tag_id, x0[cl], x0[cl + 1]};
            const Eigen::Vector2d predicted = measurement_predict(xp, lm);
            const Eigen::Matrix<double, 2, 5> h = measurement_jacobian(xp, lm);
            for (int k = 0; k < 2; ++k) {
                const double w = 1.0 / mf.sigma[k];
                for (int j = 0; j < 3; ++j) {
                    triplets.emplace_back(row + k, cp + j, h(k, j) * w);
                }
                for (int j = 0; j < 2; ++j) {
                    triplets.emplace_back(row + k, cl + j, h(k, 3 + j) * w);
                }
                sys.b[row + k] = ((k == 0 ? mf.z.dx : mf.z.dy) - predicted[k]) * w;
            }
            row += 2;
        }
    }

    sys.A.resize(rows, graph.variables.dimension());
    sys.A.setFromTriplets(triplets.begin(), triplets.end());
    return sys;
}

double residual_norm2(const FactorGraph& graph, const Eigen::VectorXd& x) {
    if (x.size() != graph.variables.dimension()) {
        throw std::invalid_argument("residual_norm2: estimate dimension does not match graph layout");
    }
    double total = 0.0;
    for (const Factor& f : graph.factors) {
        if (const auto* pf = std::get_if<PriorFactor>(&f)) {
            const Eigen::Index col = graph.variables.index_of(pf->var);
            const Eigen::Vector3d r = prior_residual(pose_from(x, col), pf->value);
            total += r.cwiseQuotient(pf->sigma).squaredNorm();
        } else if (const auto* of = std::get_if<OdometryFactor>(&f)) {
            const Pose2 xp = pose_from(x, graph.variables.index_of(of->prev));
            const Pose2 xc = pose_from(x, graph.variables.index_of(of->curr));
            RobotParams params;
            params.wheel_base = of->wheel_base;
            const Eigen::Vector3d r = odometry_residual(xp, xc, of->odom, params, xp.theta);
            total += r.cwiseQuotient(of->sigma).squaredNorm();
        } else {
            const auto& mf = std::get<MeasurementFactor>(f);
            const Pose2 xp = pose_from(x, graph.variables.index_of(mf.pose));
            const Eigen::Index cl = graph.variables.index_of(mf.landmark);
            const Landmark2 lm{mf.z.tag_id, x[cl], x[cl + 1]};
            const Eigen::Vector2d r =
                Eigen::Vector2d(mf.z.dx, mf.z.dy) - measurement_predict(xp, lm);
            total += r.cwiseQuotient(mf.sigma).squaredNorm();
        }
    }
    return total;
}

namespace {

// Approximates the dominant null-space direction of AtA by inverse iteration
// on a slightly regularized factorization, to name the loose variable.
std::optional<Eigen::Index> deficient_column(const Eigen::SparseMatrix<double>& ata, double dmax) {
    const Eigen::Index n = ata.cols();
    Eigen::SparseMatrix<double> id(n, n);
    id.setIdentity();
    Eigen::SparseMatrix<double> reg = ata + (1e-10 * dmax) * id;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(reg);
    if (ldlt.info() != Eigen::Success) {
        return std::nullopt;
    }
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = 1.0 + 0.25 * std::sin(static_cast<double>(i));
    }
    for (int pass = 0; pass < 3; ++pass) {
        v = ldlt.solve(v);
        const double norm = v.norm();
        if (!std::isfinite(norm) || norm == 0.0) {
            return std::nullopt;
        }
        v /= norm;
    }
    Eigen::Index worst = 0;
    v.cwiseAbs().maxCoeff(&worst);
    return worst;
}

[[noreturn]] void throw_singular(const StateVector* layout, Eigen::Index column,
                                 const std::string& reason) {
    std::string msg = "solve_normal_equations: " + reason;
    if (layout != nullptr) {
        msg += " at " + to_string(layout->var_at(column));
    } else {
        msg += " at column " + std::to_string(column);
    }
    throw SingularSystemError(msg, column);
}

Eigen::VectorXd solve_normal_equations_impl(const SparseSystem& sys, double lambda,
                                            const StateVector* layout) {
    if (sys.A.rows() != sys.b.size()) {
        throw std::invalid_argument("solve_normal_equations: A and b row counts differ");
    }
    const Eigen::Index n = sys.A.cols();
    Eigen::SparseMatrix<double> ata = Eigen::SparseMatrix<double>(sys.A.transpose()) * sys.A;
    const Eigen::VectorXd atb = sys.A.transpose() * sys.b;

    const Eigen::VectorXd diag = ata.diagonal();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (diag[i] == 0.0) {
            throw_singular(layout, i, "no factor constrains variable");
        }
    }

    if (lambda > 0.0) {
        Eigen::SparseMatrix<double> id(n, n);
        id.setIdentity();
        ata += lambda * id;
    }

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(ata);
    if (ldlt.info() != Eigen::Success) {
        throw SingularSystemError("solve_normal_equations: factorization failed", std::nullopt);
    }
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.maxCoeff();
    if (!(dmax > 0.0) || !d.allFinite()) {
        throw SingularSystemError("solve_normal_equations: normal matrix is not positive definite",
                                  std::nullopt);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(d[i] > 1e-12 * dmax)) {
            const auto col = deficient_column(ata, dmax);
            if (col) {
                throw_singular(layout, *col, "rank-deficient system, weakest constraint");
            }
            throw SingularSystemError("solve_normal_equations: rank-deficient system", std::nullopt);
        }
    }
    return ldlt.solve(atb);
}

}  // namespace

Eigen::VectorXd solve_normal_equations(const SparseSystem& sys, double lambda) {
    return solve_normal_equations_impl(sys, lambda, nullptr);
}

SolveResult optimize(const FactorGraph& graph, const Eigen::VectorXd& init, const SolveConfig& cfg) {
    cfg.validate();
    if (!init.allFinite()) {
        throw std::invalid_argument("optimize: initial estimate must be finite");
    }

    Eigen::VectorXd x = init;
    graph.variables.wrap_thetas(x);

    SolveResult result;
    double cost = residual_norm2(graph, x);
    result.residual_history.push_back(cost);

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        const SparseSystem sys = assemble(graph, x);

        double lambda = cfg.damping_init;
        bool retried = false;
        bool stalled = false;
        double best_rejected = std::numeric_limits<double>::infinity();
        Eigen::VectorXd x_new;
        double cost_new = 0.0;
        double predicted = 0.0;
        bool pure_gauss_newton = false;
        while (true) {
            Eigen::VectorXd delta = solve_normal_equations_impl(sys, lambda, &graph.variables);
            Eigen::VectorXd cand = x + delta;
            graph.variables.wrap_thetas(cand);
            const double c = residual_norm2(graph, cand);
            if (std::isfinite(c) && c <= cost) {
                x_new = std::move(cand);
                cost_new = c;
                predicted = (sys.b - sys.A * delta).squaredNorm();
                pure_gauss_newton = lambda == 0.0;
                break;
            }
            if (std::isfinite(c)) {
                best_rejected = std::min(best_rejected, c);
            }
            if (!retried) {
                const double start = std::max(cfg.damping_init, 1e-6);
                lambda = lambda >= start ? lambda * cfg.damping_factor : start;
                retried = true;
            } else {
                lambda *= cfg.damping_factor;
            }
            if (lambda > 1e8) {
                // Even the most damped step cannot lower the cost. If the best
                // candidate is within tolerance of the current cost the iterate
                // is a stationary point at this resolution; otherwise diverged.
                if (best_rejected - cost <= cfg.rel_tol * std::max(cost, kCostFloor)) {
                    stalled = true;
                    break;
                }
                result.estimate = x;
                result.iterations = it - 1;
                throw NonConvergenceError("optimize: damping exceeded 1e8 without a descent step",
                                          result);
            }
        }
        if (stalled) {
            result.converged = true;
            break;
        }

        x = std::move(x_new);
        result.residual_history.push_back(cost_new);
        result.iterations = it;

        // Converged when the accepted step barely moved the cost, or when a
        // pure Gauss-Newton step matched its linear model exactly (the
        // problem is locally linear, so the step landed on the minimum).
        const double denom = std::max(cost, kCostFloor);
        const bool small_decrease = cost - cost_new <= cfg.rel_tol * denom;
        const bool model_exact =
            pure_gauss_newton && std::abs(cost_new - predicted) <= cfg.rel_tol * denom;
        cost = cost_new;
        if (small_decrease || model_exact) {
            result.converged = true;
            break;
        }
    }

    result.estimate = std::move(x);
    return result;
}

void append_robot(FactorGraph& graph, const Dataset& d, const NoiseModel& noise,
                  const Pose2& origin_prior) {
    noise.validate();
    if (d.odometry.empty() && d.measurements.empty()) {
        throw std::invalid_argument("append_robot: dataset of robot " + std::to_string(d.robot_id) +
                                    " is empty");
    }
    if (graph.variables.pose_count(d.robot_id) > 0) {
        throw std::invalid_argument("append_robot: robot " + std::to_string(d.robot_id) +
                                    " already present");
    }
    for (std::size_t k = 0; k < d.odometry.size(); ++k) {
        if (d.odometry[k].state_id != static_cast<int>(k)) {
            throw std::invalid_argument("append_robot: odometry state_ids must be dense from 0");
        }
    }

    graph.variables.add_poses(d.robot_id, d.pose_count());
    for (int tag : d.observed_tags()) {
        graph.variables.add_landmark(tag);
    }

    graph.add_prior(VarId::pose(d.robot_id, 0), origin_prior, noise.sigma_prior);
    for (const auto& odom : d.odometry) {
        graph.add_odometry(VarId::pose(d.robot_id, odom.state_id),
                           VarId::pose(d.robot_id, odom.state_id + 1), odom,
                           d.params.wheel_base, noise.sigma_odom);
    }
    for (const auto& z : d.measurements) {
        graph.add_measurement(VarId::pose(d.robot_id, z.state_id), VarId::landmark(z.tag_id), z,
                              noise.sigma_meas);
    }
}

FactorGraph build_local_graph(const Dataset& d, const NoiseModel& noise) {
    FactorGraph graph;
    append_robot(graph, d, noise, Pose2{});
    return graph;
}

void write_initial_estimate(const FactorGraph& graph, const Dataset& d, const Pose2& origin,
                            Eigen::VectorXd& x) {
    const std::vector<Pose2> poses = dead_reckon(d, origin);
    for (std::size_t t = 0; t < poses.size(); ++t) {
        graph.variables.set_pose(x, d.robot_id, static_cast<int>(t), poses[t]);
    }
    std::set<int> done;
    for (const auto& z : d.measurements) {
        if (!done.insert(z.tag_id).second) {
            continue;  // landmarks start at their first observation
        }
        const Landmark2 lm = landmark_init(poses[static_cast<std::size_t>(z.state_id)], z);
        graph.variables.set_landmark(x, z.tag_id, lm.position());
    }
}

Eigen::VectorXd initial_estimate(const FactorGraph& graph, const Dataset& d) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(graph.variables.dimension());
    write_initial_estimate(graph, d, Pose2{}, x);
    return x;
}

}  // namespace msam
