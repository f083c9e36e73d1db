#include "sublinear/sparse.hpp"

#include "sublinear/errors.hpp"
#include "sublinear/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace sublinear {

namespace {

VectorXd initial_point(const Dataset& data, const std::optional<VectorXd>& start) {
    if (start) {
        if (static_cast<std::size_t>(start->size()) != data.dim())
            throw DomainError("starting point has the wrong dimension");
        return *start;
    }
    try {
        return ols_fit(data).beta;
    } catch (const SingularMatrixError&) {
        return VectorXd::Zero(static_cast<Eigen::Index>(data.dim()));
    }
}

FitResult penalized_fit(const Dataset& data, const LassoConfig& config, double shift,
                        const VectorXd& start, const std::string& method) {
    const MinimaxProblem problem(data, shift);
    const SolverOutcome outcome = solve_minimax(problem, config.lambda, start, config.solver);
    SolverOutcome reported = outcome;
    for (Eigen::Index k = 0; k < reported.beta.size(); ++k)
        if (std::abs(reported.beta(k)) < config.zero_threshold) reported.beta(k) = 0.0;
    reported.objective = problem.objective(reported.beta, config.lambda);
    FitResult out = detail::fit_from_outcome(problem, reported, method, config.lambda);
    out.diagnostics.lambda = config.lambda;
    out.diagnostics.selected.resize(data.dim());
    for (std::size_t k = 0; k < data.dim(); ++k)
        out.diagnostics.selected[k] = out.beta(static_cast<Eigen::Index>(k)) != 0.0;
    return out;
}

double validation_score(const Dataset& validation, const VectorXd& beta, double shift) {
    return block_mse(validation, beta, shift).maxCoeff();
}

}  // namespace

void LassoConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be non-negative");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] >= 0.0)) throw DomainError("lambda grid values must be non-negative");
        if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1]))
            throw DomainError("lambda grid must be strictly increasing");
    }
    if (cv_folds < 2) throw DomainError("cv_folds must be at least 2");
    if (!(zero_threshold >= 0.0)) throw DomainError("zero_threshold must be non-negative");
    solver.validate();
}

FitResult glasso_fit(const Dataset& data, const LassoConfig& config, const std::optional<VectorXd>& start) {
    config.validate();
    data.blocks().balanced_size();
    return penalized_fit(data, config, 0.0, initial_point(data, start), "glasso");
}

FitResult glasso_mean_uncertain_fit(const Dataset& data, const LassoConfig& config,
                                    const std::optional<VectorXd>& start) {
    config.validate();
    data.blocks().balanced_size();
    const FitResult first = penalized_fit(data, config, 0.0, initial_point(data, start), "glasso");
    const UpperMeanEstimate mu = mu_upper_hat(data, first.beta);
    FitResult out = penalized_fit(data, config, mu.value, first.beta, "glasso_mu");
    out.mu_upper_hat = mu.value;
    out.diagnostics.mu_block = mu.block;
    out.iterations += first.iterations;
    return out;
}

std::vector<double> default_lambda_grid(const Dataset& data, std::size_t count, double lo) {
    if (count == 0) throw DomainError("lambda grid needs at least one point");
    const MinimaxProblem problem(data);
    std::size_t top = 0;
    for (std::size_t i = 1; i < problem.block_count(); ++i)
        if (problem.block(i).mean_square > problem.block(top).mean_square) top = i;
    const double hi = 2.0 * problem.block(top).cross.cwiseAbs().maxCoeff();
    if (count == 1 || !(hi > lo)) return {std::max(hi, lo)};
    std::vector<double> grid(count);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t k = 0; k < count; ++k)
        grid[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

CvCurve cv_select_lambda(const Dataset& data, const LassoConfig& config, CvObjective objective) {
    config.validate();
    const std::size_t n = data.blocks().balanced_size();
    CvCurve out;
    out.grid = config.lambda_grid.empty() ? default_lambda_grid(data) : config.lambda_grid;
    if (out.grid.empty()) throw DomainError("lambda grid is empty");
    if (out.grid.size() == 1) {
        out.lambda_star = out.grid.front();
        out.scores.assign(1, 0.0);
        return out;
    }
    const std::size_t folds = config.cv_folds;
    if (n < folds) throw PreconditionError("block size is smaller than the number of folds");

    LassoConfig fit_config = config;
    fit_config.solver.max_iterations = std::min(config.solver.max_iterations, config.cv_max_iterations);

    std::vector<double> totals(out.grid.size(), 0.0);
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train, valid;
        for (std::size_t j = 0; j < n; ++j) (j % folds == f ? valid : train).push_back(j);
        const Dataset train_set = data.select_within_blocks(train);
        const Dataset valid_set = data.select_within_blocks(valid);

        // path from the largest lambda down, warm-started
        VectorXd warm = VectorXd::Zero(static_cast<Eigen::Index>(data.dim()));
        for (std::size_t g = out.grid.size(); g-- > 0;) {
            fit_config.lambda = out.grid[g];
            double score = 0.0;
            if (objective == CvObjective::mean_certain) {
                const FitResult fit = glasso_fit(train_set, fit_config, warm);
                warm = fit.beta;
                score = validation_score(valid_set, fit.beta, 0.0);
            } else {
                const FitResult fit = glasso_mean_uncertain_fit(train_set, fit_config, warm);
                warm = fit.beta;
                score = validation_score(valid_set, fit.beta, *fit.mu_upper_hat);
            }
            totals[g] += score;
        }
    }
    out.scores.resize(out.grid.size());
    std::size_t best = out.grid.size() - 1;
    for (std::size_t g = out.grid.size(); g-- > 0;) {
        out.scores[g] = totals[g] / static_cast<double>(folds);
        if (out.scores[g] < out.scores[best]) best = g;
    }
    out.lambda_star = out.grid[best];
    return out;
}

}  // namespace sublinear
