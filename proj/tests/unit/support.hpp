#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cloaksim/lm.hpp"

namespace testing {

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

// Central differences in user coordinates, step 1e-6 * scale.
inline Eigen::MatrixXd central_jacobian(const cloaksim::ResidualFunction& f, std::span<const double> x,
                                        std::span<const double> scales) {
    std::vector<double> p(x.begin(), x.end());
    const std::vector<double> r0 = f(p);
    Eigen::MatrixXd j(r0.size(), p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double h = 1e-6 * scales[k];
        const double keep = p[k];
        p[k] = keep + h;
        const std::vector<double> up = f(p);
        p[k] = keep - h;
        const std::vector<double> dn = f(p);
        p[k] = keep;
        for (std::size_t i = 0; i < r0.size(); ++i) j(i, k) = (up[i] - dn[i]) / (2.0 * h);
    }
    return j;
}

// Column-wise relative agreement between the library Jacobian and central differences.
inline double jacobian_mismatch(const cloaksim::FitProblem& problem, std::span<const double> x) {
    std::vector<double> scales(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double s = problem.scales.empty() ? 1.0 : problem.scales[k];
        scales[k] = std::max(std::abs(x[k]), s);
    }
    const Eigen::MatrixXd a = cloaksim::forward_difference_jacobian(problem.residuals, x, problem.scales);
    const Eigen::MatrixXd b = central_jacobian(problem.residuals, x, scales);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
        const double norm = b.col(k).norm();
        if (norm == 0.0) {
            worst = std::max(worst, a.col(k).norm());
            continue;
        }
        worst = std::max(worst, (a.col(k) - b.col(k)).norm() / norm);
    }
    return worst;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double stddev(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace testing
