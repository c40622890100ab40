#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cloaksim {

// Positive parameters (widths, rates) are optimized in log space.
enum class ParamTransform { identity, log };

using ResidualFunction = std::function<std::vector<double>(std::span<const double>)>;

struct FitProblem {
    ResidualFunction residuals;            // unweighted model - data
    std::vector<double> initial;
    std::vector<double> lower;             // empty: unbounded
    std::vector<double> upper;
    std::vector<double> weights;           // per residual; empty: uniform
    std::vector<ParamTransform> transforms;  // empty: identity
    std::vector<double> scales;  // typical magnitude of identity parameters; empty: 1
    std::vector<std::string> names;

    void validate() const;
};

struct LmOptions {
    int max_iterations = 200;
    double ftol = 1e-10;  // relative cost change on an accepted step
    double gtol = 1e-8;   // infinity norm of the scaled gradient
    double xtol = 1e-14;  // relative step size
    double initial_lambda = 0.0;  // 0: first try a Gauss-Newton step
    int restarts = 0;             // re-launch from the best point with fresh damping
    bool scale_covariance = true;  // multiply (J^T W J)^-1 by RSS / (m - n)
};

struct FitResult {
    std::vector<std::string> names;
    std::vector<double> parameters;
    std::vector<double> standard_errors;
    Eigen::MatrixXd covariance;
    std::vector<double> residuals;  // weighted, at the solution
    double rss = 0.0;               // weighted residual sum of squares
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string termination;
    std::vector<std::string> warnings;
    std::vector<double> cost_history;  // cost after each accepted step, starting point first

    double reduced_chi_square() const;
    double parameter(const std::string& name) const;
    double error(const std::string& name) const;
};

// Levenberg-Marquardt with Marquardt diagonal scaling and a forward-difference
// Jacobian in transformed coordinates. Cost is non-increasing over accepted
// steps; the best point is returned if the iteration cap is hit.
// Throws EvaluationError when the residual is non-finite at the start.
FitResult lm_minimize(const FitProblem& problem, const LmOptions& options = {});

// Forward-difference Jacobian of f at x with steps sqrt(eps) * max(|x_j|, scale_j).
Eigen::MatrixXd forward_difference_jacobian(const ResidualFunction& f, std::span<const double> x,
                                            std::span<const double> scales = {});

}  // namespace cloaksim
