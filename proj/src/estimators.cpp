#include "sublinear/estimators.hpp"

#include "sublinear/errors.hpp"
#include "sublinear/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sublinear {

namespace {

constexpr double kTieTol = 1e-12;

std::vector<std::size_t> ties_at(const VectorXd& values) {
    const double top = values.maxCoeff();
    const double tol = kTieTol * std::max(1.0, std::abs(top));
    std::vector<std::size_t> out;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (values(i) >= top - tol) out.push_back(static_cast<std::size_t>(i));
    return out;
}

}  // namespace

VectorXd block_mse(const Dataset& data, const VectorXd& beta, double shift) {
    if (static_cast<std::size_t>(beta.size()) != data.dim())
        throw DomainError("coefficient vector has the wrong dimension");
    const VectorXd fitted = data.x() * beta;
    VectorXd out(static_cast<Eigen::Index>(data.block_count()));
    for (std::size_t i = 0; i < data.block_count(); ++i) {
        const auto& rows = data.blocks().block(i);
        double s = 0.0;
        for (auto r : rows) {
            const auto rr = static_cast<Eigen::Index>(r);
            const double e = data.y()(rr) - fitted(rr) - shift;
            s += e * e;
        }
        out(static_cast<Eigen::Index>(i)) = s / static_cast<double>(rows.size());
    }
    return out;
}

FitResult ols_fit(const Dataset& data) {
    if (data.rows() <= data.dim()) throw SingularMatrixError("design matrix rank deficient");
    const MatrixXd& x = data.x();
    const MatrixXd xtx = x.transpose() * x;
    const linalg::SpdFactor factor(xtx, "design matrix rank deficient");
    FitResult out;
    out.beta = factor.solve(VectorXd(x.transpose() * data.y()));
    const VectorXd resid = data.y() - x * out.beta;
    out.objective_value = resid.squaredNorm() / static_cast<double>(data.rows());
    const VectorXd mse = block_mse(data, out.beta);
    const auto ties = ties_at(mse);
    out.active_block = ties.front();
    out.iterations = 0;
    out.converged = true;
    out.diagnostics.method = "ols";
    out.diagnostics.stage = "closed_form";
    out.diagnostics.tied_blocks = ties;
    out.diagnostics.block_mse.assign(mse.data(), mse.data() + mse.size());
    return out;
}

namespace detail {

FitResult fit_from_outcome(const MinimaxProblem& problem, const SolverOutcome& outcome,
                           const std::string& method, double lambda) {
    FitResult out;
    out.beta = outcome.beta;
    out.objective_value = outcome.objective;
    out.iterations = outcome.iterations;
    out.converged = outcome.converged;
    const VectorXd values = problem.values(outcome.beta);
    const auto ties = ties_at(values);
    out.active_block = ties.front();
    auto& d = out.diagnostics;
    d.method = method;
    d.stage = outcome.stage;
    d.optimality_gap = outcome.gap;
    d.lower_bound = outcome.lower_bound;
    d.tied_blocks = ties;
    d.active_set = outcome.active_set;
    d.block_mse.assign(values.data(), values.data() + values.size());
    if (lambda > 0.0 || method.rfind("glasso", 0) == 0) d.lambda = lambda;
    return out;
}

}  // namespace detail

FitResult minimax_fit(const Dataset& data, const SolverConfig& config) {
    config.validate();
    data.blocks().balanced_size();
    const FitResult init = ols_fit(data);
    const MinimaxProblem problem(data);
    const SolverOutcome outcome = solve_minimax(problem, 0.0, init.beta, config);
    return detail::fit_from_outcome(problem, outcome, "minimax", 0.0);
}

UpperMeanEstimate mu_upper_hat(const Dataset& data, const VectorXd& beta_init) {
    data.blocks().balanced_size();
    if (static_cast<std::size_t>(beta_init.size()) != data.dim())
        throw DomainError("coefficient vector has the wrong dimension");
    const VectorXd resid = data.y() - data.x() * beta_init;
    UpperMeanEstimate best{-std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < data.block_count(); ++i) {
        const auto& rows = data.blocks().block(i);
        double s = 0.0;
        for (auto r : rows) s += resid(static_cast<Eigen::Index>(r));
        const double mean = s / static_cast<double>(rows.size());
        if (mean > best.value) best = {mean, i};
    }
    return best;
}

std::vector<std::size_t> uncentered_columns(const MatrixXd& x, double threshold) {
    std::vector<std::size_t> out;
    const double n = static_cast<double>(x.rows());
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
        const double mean = x.col(k).mean();
        const double var = n > 1 ? (x.col(k).array() - mean).square().sum() / (n - 1.0) : 0.0;
        if (std::abs(mean) > threshold * std::sqrt(var)) out.push_back(static_cast<std::size_t>(k));
    }
    return out;
}

FitResult profile_minimax_fit(const Dataset& data, const SolverConfig& config, ProfileInit init,
                              double centering_threshold) {
    config.validate();
    data.blocks().balanced_size();
    const FitResult first = init == ProfileInit::ols ? ols_fit(data) : minimax_fit(data, config);
    const UpperMeanEstimate mu = mu_upper_hat(data, first.beta);
    const MinimaxProblem problem(data, mu.value);
    const SolverOutcome outcome = solve_minimax(problem, 0.0, first.beta, config);
    FitResult out = detail::fit_from_outcome(problem, outcome, "profile", 0.0);
    out.mu_upper_hat = mu.value;
    out.diagnostics.mu_block = mu.block;
    for (auto k : uncentered_columns(data.x(), centering_threshold)) {
        std::ostringstream msg;
        msg << "covariate x" << (k + 1) << " is not centered; the profile estimate may be biased";
        out.diagnostics.warnings.push_back(msg.str());
    }
    return out;
}

double predict(const VectorXd& beta, std::optional<double> mu_upper_hat, const VectorXd& x_new) {
    if (beta.size() != x_new.size()) throw DomainError("covariate vector has the wrong dimension");
    const double base = beta.dot(x_new);
    return mu_upper_hat ? base + *mu_upper_hat : base;
}

}  // namespace sublinear
