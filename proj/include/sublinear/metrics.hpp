#pragma once

#include "sublinear/core_model.hpp"

namespace sublinear {

/// Maximum over blocks of the shifted block mean squared error.
double mpe(const Dataset& data, const VectorXd& beta, double shift = 0.0);

/// Average over blocks of the shifted block mean squared error.
double ape(const Dataset& data, const VectorXd& beta, double shift = 0.0);

/// Per-coordinate mean of (estimate - beta0)^2 over the rows of `estimates`.
VectorXd coefficient_mse(const MatrixXd& estimates, const VectorXd& beta0);

struct NormalityDiagnostics {
    std::size_t replications = 0;
    MatrixXd empirical;  ///< covariance of sqrt(n) (estimate - beta0)
    MatrixXd target;     ///< target_sigma2 * target_exx^{-1}
    double relative_frobenius = 0.0;
    VectorXd skewness;
    VectorXd excess_kurtosis;
};

/// Compares the spread of sqrt(n)(estimate - beta0) with the normal limit
/// N(0, target_sigma2 * target_exx^{-1}). Requires at least 100 rows.
NormalityDiagnostics normality_check(const MatrixXd& estimates, const VectorXd& beta0, double n,
                                     double target_sigma2, const MatrixXd& target_exx);

/// Sum of `values` in ascending order, so the result is independent of input order.
double ordered_sum(std::vector<double> values);

}  // namespace sublinear
