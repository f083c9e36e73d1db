#pragma once

#include "sublinear/core_model.hpp"
#include "sublinear/minimax_solver.hpp"

#include <optional>
#include <vector>

namespace sublinear {

struct LassoConfig {
    double lambda = 0.0;
    std::vector<double> lambda_grid;  ///< empty: default_lambda_grid(data)
    std::size_t cv_folds = 5;
    SolverConfig solver;
    double zero_threshold = 1e-6;
    /// Subgradient budget used for each fit inside cross-validation.
    std::size_t cv_max_iterations = 300;

    void validate() const;
};

/// argmin_beta max_i block_mse(beta) + lambda |beta|_1, started from `start`
/// (OLS when absent). Coefficients below zero_threshold in magnitude are set
/// to zero and flagged as not selected.
FitResult glasso_fit(const Dataset& data, const LassoConfig& config,
                     const std::optional<VectorXd>& start = std::nullopt);

/// Penalized fit after shifting responses by the upper-mean estimate taken
/// from an initial glasso_fit at the same lambda.
FitResult glasso_mean_uncertain_fit(const Dataset& data, const LassoConfig& config,
                                    const std::optional<VectorXd>& start = std::nullopt);

enum class CvObjective { mean_certain, mean_uncertain };

struct CvCurve {
    double lambda_star = 0.0;
    std::vector<double> grid;    ///< ascending
    std::vector<double> scores;  ///< fold-averaged max-over-blocks validation MSE
};

/// K-fold cross-validation with folds cut inside every block (row at block
/// position j goes to fold j mod K). Ties in score go to the larger lambda.
CvCurve cv_select_lambda(const Dataset& data, const LassoConfig& config, CvObjective objective);

/// `count` log-spaced values on [lo, lambda_max], where lambda_max = 2 max_k |c_k|
/// for the block with the largest mean square response, c = X'Y / n on that block.
std::vector<double> default_lambda_grid(const Dataset& data, std::size_t count = 50, double lo = 1e-4);

}  // namespace sublinear
