#include "cloaksim/lm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cloaksim/errors.hpp"

namespace cloaksim {

void FitProblem::validate() const {
    const std::size_t n = initial.size();
    if (!residuals) throw DomainError("fit problem has no residual function");
    if (n == 0) throw DomainError("fit problem has no parameters");
    const auto sized = [n](const auto& v) { return v.empty() || v.size() == n; };
    if (!sized(lower) || !sized(upper) || !sized(transforms) || !sized(scales) || !sized(names)) {
        throw DomainError("per-parameter vectors must match the parameter count");
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = lower.empty() ? -std::numeric_limits<double>::infinity() : lower[j];
        const double hi = upper.empty() ? std::numeric_limits<double>::infinity() : upper[j];
        if (!(lo <= hi)) throw DomainError("bounds out of order");
        if (!(initial[j] >= lo && initial[j] <= hi)) {
            throw DomainError("initial parameter outside its bounds");
        }
        if (!transforms.empty() && transforms[j] == ParamTransform::log && !(initial[j] > 0.0)) {
            throw DomainError("log-transformed parameter must start positive");
        }
    }
}

double FitResult::reduced_chi_square() const {
    const auto dof = static_cast<double>(residuals.size()) - static_cast<double>(parameters.size());
    return dof > 0 ? rss / dof : std::numeric_limits<double>::quiet_NaN();
}

namespace {

std::size_t index_of(const std::vector<std::string>& names, const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw DomainError("unknown fit parameter: " + name);
    return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

double FitResult::parameter(const std::string& name) const {
    return parameters[index_of(names, name)];
}

double FitResult::error(const std::string& name) const {
    return standard_errors[index_of(names, name)];
}

Eigen::MatrixXd forward_difference_jacobian(const ResidualFunction& f, std::span<const double> x,
                                            std::span<const double> scales) {
    const std::vector<double> r0 = f(x);
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(r0.size()), static_cast<Eigen::Index>(x.size()));
    std::vector<double> xp(x.begin(), x.end());
    const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double scale = scales.empty() ? 1.0 : scales[j];
        const double target = x[j] + root_eps * std::max(std::abs(x[j]), scale);
        xp[j] = target;
        const double h = xp[j] - x[j];
        const std::vector<double> r1 = f(xp);
        for (std::size_t i = 0; i < r0.size(); ++i) {
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (r1[i] - r0[i]) / h;
        }
        xp[j] = x[j];
    }
    return jac;
}

namespace {

// Residuals in transformed coordinates, weighted.
class TransformedProblem {
public:
    explicit TransformedProblem(const FitProblem& p) : p_(p), n_(p.initial.size()) {}

    std::size_t size() const { return n_; }

    bool is_log(std::size_t j) const {
        return !p_.transforms.empty() && p_.transforms[j] == ParamTransform::log;
    }

    double lower(std::size_t j) const {
        return p_.lower.empty() ? -std::numeric_limits<double>::infinity() : p_.lower[j];
    }
    double upper(std::size_t j) const {
        return p_.upper.empty() ? std::numeric_limits<double>::infinity() : p_.upper[j];
    }

    std::vector<double> to_internal(std::span<const double> user) const {
        std::vector<double> u(user.begin(), user.end());
        for (std::size_t j = 0; j < n_; ++j) {
            if (is_log(j)) u[j] = std::log(u[j]);
        }
        return u;
    }

    std::vector<double> to_user(std::span<const double> u) const {
        std::vector<double> p(u.begin(), u.end());
        for (std::size_t j = 0; j < n_; ++j) {
            if (is_log(j)) p[j] = std::exp(p[j]);
            p[j] = std::clamp(p[j], lower(j), upper(j));
        }
        return p;
    }

    // Keeps internal coordinates consistent with the bound projection.
    std::vector<double> project(std::span<const double> u) const {
        return to_internal(to_user(u));
    }

    std::vector<double> scales() const {
        std::vector<double> s(n_, 1.0);
        for (std::size_t j = 0; j < n_; ++j) {
            if (!is_log(j) && !p_.scales.empty()) s[j] = p_.scales[j];
        }
        return s;
    }

    std::vector<double> residuals(std::span<const double> u) const {
        std::vector<double> r = p_.residuals(to_user(u));
        if (!p_.weights.empty()) {
            if (p_.weights.size() != r.size()) {
                throw DomainError("weight count does not match residual count");
            }
            for (std::size_t i = 0; i < r.size(); ++i) r[i] *= std::sqrt(p_.weights[i]);
        }
        return r;
    }

private:
    const FitProblem& p_;
    std::size_t n_;
};

double sum_squares(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

bool all_finite(const std::vector<double>& r) {
    return std::all_of(r.begin(), r.end(), [](double v) { return std::isfinite(v); });
}

Eigen::Map<const Eigen::VectorXd> as_vector(const std::vector<double>& v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

struct RunState {
    std::vector<double> u;
    std::vector<double> r;
    double cost = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string termination;
    std::vector<double> history;
};

void run_lm(const TransformedProblem& tp, const LmOptions& opt, RunState& st) {
    const std::size_t n = tp.size();
    const std::vector<double> scales = tp.scales();
    const ResidualFunction f = [&](std::span<const double> u) { return tp.residuals(u); };
    double lambda = opt.initial_lambda;
    st.converged = false;
    st.termination = "iteration limit reached";

    while (st.iterations < opt.max_iterations) {
        if (st.cost == 0.0) {
            st.converged = true;
            st.termination = "zero residual";
            return;
        }
        ++st.iterations;
        const Eigen::MatrixXd jac = forward_difference_jacobian(f, st.u, scales);
        st.evaluations += static_cast<int>(n);
        const Eigen::VectorXd r = as_vector(st.r);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * r;

        Eigen::VectorXd diag = jtj.diagonal();
        const double diag_max = std::max(diag.maxCoeff(), std::numeric_limits<double>::min());
        for (Eigen::Index j = 0; j < diag.size(); ++j) diag(j) = std::max(diag(j), 1e-12 * diag_max);

        double scaled_grad = 0.0;
        const double rnorm = std::sqrt(st.cost);
        for (Eigen::Index j = 0; j < grad.size(); ++j) {
            scaled_grad = std::max(scaled_grad, std::abs(grad(j)) / (std::sqrt(diag(j)) * rnorm));
        }
        if (scaled_grad < opt.gtol) {
            st.converged = true;
            st.termination = "gradient below tolerance";
            return;
        }

        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * diag;
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
            Eigen::VectorXd step = ldlt.solve(-grad);
            const bool solved = ldlt.info() == Eigen::Success && step.allFinite() &&
                                (lambda > 0.0 || ldlt.isPositive());
            if (solved) {
                std::vector<double> trial(n);
                for (std::size_t j = 0; j < n; ++j) trial[j] = st.u[j] + step(static_cast<Eigen::Index>(j));
                trial = tp.project(trial);
                std::vector<double> rt = tp.residuals(trial);
                ++st.evaluations;
                const double cost = sum_squares(rt);
                if (all_finite(rt) && cost < st.cost) {
                    const double rel = (st.cost - cost) / st.cost;
                    double step_norm = 0.0, u_norm = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        step_norm += std::pow(trial[j] - st.u[j], 2);
                        u_norm += st.u[j] * st.u[j];
                    }
                    st.u = std::move(trial);
                    st.r = std::move(rt);
                    st.cost = cost;
                    st.history.push_back(cost);
                    accepted = true;
                    lambda = lambda < 1e-15 ? 0.0 : lambda / 10.0;
                    if (rel < opt.ftol) {
                        st.converged = true;
                        st.termination = "relative cost change below tolerance";
                        return;
                    }
                    if (std::sqrt(step_norm) < opt.xtol * (std::sqrt(u_norm) + opt.xtol)) {
                        st.converged = true;
                        st.termination = "step below tolerance";
                        return;
                    }
                    continue;
                }
            }
            lambda = lambda == 0.0 ? 1e-3 : lambda * 10.0;
            if (lambda > 1e16) {
                st.converged = true;
                st.termination = "no further decrease possible";
                return;
            }
        }
    }
}

}  // namespace

FitResult lm_minimize(const FitProblem& problem, const LmOptions& options) {
    problem.validate();
    const TransformedProblem tp(problem);
    const std::size_t n = tp.size();

    RunState st;
    st.u = tp.project(tp.to_internal(problem.initial));
    st.r = tp.residuals(st.u);
    st.evaluations = 1;
    if (!all_finite(st.r)) throw EvaluationError("residual is not finite at the starting point");
    if (st.r.size() < n) throw DomainError("fewer residuals than parameters");
    st.cost = sum_squares(st.r);
    st.history.push_back(st.cost);

    run_lm(tp, options, st);
    for (int k = 0; k < options.restarts; ++k) {
        const double before = st.cost;
        const int limit = st.iterations + options.max_iterations;
        LmOptions again = options;
        again.max_iterations = limit;
        run_lm(tp, again, st);
        if (!(st.cost < before * (1.0 - options.ftol))) break;
    }

    FitResult out;
    out.names = problem.names;
    if (out.names.empty()) {
        for (std::size_t j = 0; j < n; ++j) out.names.push_back("p" + std::to_string(j));
    }
    out.parameters = tp.to_user(st.u);
    out.residuals = st.r;
    out.rss = st.cost;
    out.iterations = st.iterations;
    out.evaluations = st.evaluations;
    out.converged = st.converged;
    out.termination = st.termination;
    out.cost_history = std::move(st.history);

    const ResidualFunction f = [&](std::span<const double> u) { return tp.residuals(u); };
    const std::vector<double> col_scales = tp.scales();
    const Eigen::VectorXd sc = as_vector(col_scales);
    const Eigen::MatrixXd jac = forward_difference_jacobian(f, st.u, col_scales) * sc.asDiagonal();
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jtj);
    const Eigen::VectorXd ev = eig.eigenvalues();
    const double ev_max = ev.cwiseAbs().maxCoeff();
    Eigen::VectorXd inv_ev(ev.size());
    bool deficient = false;
    for (Eigen::Index j = 0; j < ev.size(); ++j) {
        if (ev(j) > 1e-13 * ev_max && ev_max > 0.0) {
            inv_ev(j) = 1.0 / ev(j);
        } else {
            inv_ev(j) = 0.0;
            deficient = true;
        }
    }
    Eigen::MatrixXd cov = sc.asDiagonal() *
                          (eig.eigenvectors() * inv_ev.asDiagonal() * eig.eigenvectors().transpose()) *
                          sc.asDiagonal();
    if (deficient) out.warnings.push_back("rank-deficient Jacobian: covariance is a pseudo-inverse");
    const double dof = static_cast<double>(st.r.size()) - static_cast<double>(n);
    if (options.scale_covariance && dof > 0) cov *= st.cost / dof;
    Eigen::VectorXd d(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        d(static_cast<Eigen::Index>(j)) = tp.is_log(j) ? out.parameters[j] : 1.0;
    }
    out.covariance = d.asDiagonal() * cov * d.asDiagonal();
    out.standard_errors.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.standard_errors[j] = std::sqrt(std::max(0.0, out.covariance(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j))));
    }
    if (!out.converged) out.warnings.push_back("did not converge: " + out.termination);
    return out;
}

}  // namespace cloaksim
