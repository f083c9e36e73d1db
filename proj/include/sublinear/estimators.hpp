#pragma once

#include "sublinear/core_model.hpp"
#include "sublinear/minimax_solver.hpp"

#include <optional>

namespace sublinear {

/// Least squares on all rows. Throws SingularMatrixError("design matrix rank
/// deficient") when N <= p or X'X fails the pivot test.
FitResult ols_fit(const Dataset& data);

/// (1/n_i) sum_j (Y_ij - beta'x_ij - shift)^2 for every block.
VectorXd block_mse(const Dataset& data, const VectorXd& beta, double shift = 0.0);

/// Mini-max estimator: argmin_beta max_i block_mse(beta), started from OLS.
FitResult minimax_fit(const Dataset& data, const SolverConfig& config = {});

struct UpperMeanEstimate {
    double value = 0.0;
    std::size_t block = 0;  ///< block with the largest mean residual (lowest index on ties)
};

/// max_i (1/n) sum_j (Y_ij - beta'x_ij).
UpperMeanEstimate mu_upper_hat(const Dataset& data, const VectorXd& beta_init);

enum class ProfileInit { ols, minimax };

/// Two-stage estimator for mean-uncertain errors. A covariate column whose
/// sample mean exceeds `centering_threshold` times its standard deviation
/// adds a warning to the diagnostics.
FitResult profile_minimax_fit(const Dataset& data, const SolverConfig& config = {},
                              ProfileInit init = ProfileInit::ols, double centering_threshold = 0.1);

/// beta'x_new, plus mu_upper_hat when given.
double predict(const VectorXd& beta, std::optional<double> mu_upper_hat, const VectorXd& x_new);

/// Columns whose sample mean exceeds threshold times the column standard deviation.
std::vector<std::size_t> uncentered_columns(const MatrixXd& x, double threshold);

namespace detail {
/// Fills a FitResult from a solver outcome on `problem`.
FitResult fit_from_outcome(const MinimaxProblem& problem, const SolverOutcome& outcome,
                           const std::string& method, double lambda);
}  // namespace detail

}  // namespace sublinear
