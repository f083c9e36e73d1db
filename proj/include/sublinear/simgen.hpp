#pragma once

#include "sublinear/core_model.hpp"

#include <cstdint>
#include <string>

namespace sublinear {

enum class ExperimentId { exp1, exp2, exp3_indep, exp3_corr, exp4 };

std::string to_string(ExperimentId id);
/// Throws DomainError("unknown experiment ...") for other names.
ExperimentId experiment_from_string(const std::string& name);

enum class CovariateLaw {
    iid_normal,           ///< every coordinate N(cov_mean, cov_var) independently
    multivariate_normal,  ///< N(mvn_mean, sigma)
};

struct ExperimentConfig {
    std::size_t p = 1;
    VectorXd beta0;
    CovariateLaw covariate_law = CovariateLaw::iid_normal;
    double cov_mean = 0.0;
    double cov_var = 1.0;
    VectorXd mvn_mean;  ///< empty means zero
    MatrixXd sigma;
    double mu_lower = 0.0;
    double mu_upper = 0.0;
    double var_lower = 0.0;
    double var_upper = 0.0;
    std::size_t m = 1;
    std::size_t n = 1;
    std::uint64_t seed = 0;

    void validate() const;
    /// E[x] of the covariate law.
    VectorXd covariate_mean() const;
    /// E[xx'] of the covariate law.
    MatrixXd covariate_second_moment() const;
};

/// Configuration of a named experiment with the given seed.
ExperimentConfig experiment_config(ExperimentId id, std::uint64_t seed);

/// Equicorrelation matrix: ones on the diagonal, rho elsewhere.
MatrixXd equicorrelation(std::size_t p, double rho);

struct BlockErrors {
    MatrixXd errors;  ///< m x n, row i holds block i
    DistributionFamily truth;
};

/// Draws mu_i ~ U[mu_lower, mu_upper] and sigma_i^2 ~ U[var_lower, var_upper]
/// for every block, then eps_ij ~ N(mu_i, sigma_i^2). Block i uses its own
/// sub-stream of config.seed.
BlockErrors sample_block_errors(const ExperimentConfig& config);

/// Errors for a fixed family, n per block, from sub-streams of `seed`.
MatrixXd sample_errors_for_family(const DistributionFamily& family, std::size_t n, std::uint64_t seed);

/// Covariates for m blocks of n rows from sub-streams of `seed`.
MatrixXd sample_covariates(const ExperimentConfig& config, std::uint64_t seed);

struct SimulatedData {
    Dataset data;
    VectorXd beta0;
    DistributionFamily family;
    ExperimentConfig config;
};

/// Family, covariates and errors drawn from config.seed; time-ordered blocks.
SimulatedData simulate(const ExperimentConfig& config);

/// Same design with a given family; covariates and errors from `seed`.
SimulatedData simulate_with_family(const ExperimentConfig& config, const DistributionFamily& family,
                                   std::uint64_t seed);

/// Named experiment with the given seed.
SimulatedData make_experiment(ExperimentId id, std::uint64_t seed);

}  // namespace sublinear
