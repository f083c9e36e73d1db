#include "sublinear/simgen.hpp"

#include "sublinear/errors.hpp"
#include "sublinear/partition.hpp"
#include "sublinear/random.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace sublinear {

namespace {

enum Stream : std::uint64_t { kFamily = 1, kErrors = 2, kCovariates = 3 };

}  // namespace

std::string to_string(ExperimentId id) {
    switch (id) {
        case ExperimentId::exp1: return "exp1";
        case ExperimentId::exp2: return "exp2";
        case ExperimentId::exp3_indep: return "exp3_indep";
        case ExperimentId::exp3_corr: return "exp3_corr";
        case ExperimentId::exp4: return "exp4";
    }
    return "exp1";
}

ExperimentId experiment_from_string(const std::string& name) {
    if (name == "exp1") return ExperimentId::exp1;
    if (name == "exp2") return ExperimentId::exp2;
    if (name == "exp3_indep" || name == "exp3") return ExperimentId::exp3_indep;
    if (name == "exp3_corr") return ExperimentId::exp3_corr;
    if (name == "exp4") return ExperimentId::exp4;
    throw DomainError("unknown experiment '" + name + "'");
}

void ExperimentConfig::validate() const {
    if (p < 1) throw DomainError("p must be at least 1");
    if (static_cast<std::size_t>(beta0.size()) != p) throw DomainError("beta0 must have p entries");
    if (m < 1 || n < 1) throw DomainError("m and n must be at least 1");
    if (!(mu_lower <= mu_upper)) throw DomainError("error mean range is empty");
    if (!(var_lower >= 0.0) || !(var_lower <= var_upper)) throw DomainError("error variance range is invalid");
    if (covariate_law == CovariateLaw::iid_normal) {
        if (!(cov_var >= 0.0)) throw DomainError("covariate variance must be non-negative");
    } else {
        if (sigma.rows() != static_cast<Eigen::Index>(p) || sigma.cols() != static_cast<Eigen::Index>(p))
            throw DomainError("covariance matrix must be p x p");
        if (mvn_mean.size() != 0 && mvn_mean.size() != static_cast<Eigen::Index>(p))
            throw DomainError("covariate mean must have p entries");
    }
}

VectorXd ExperimentConfig::covariate_mean() const {
    const auto P = static_cast<Eigen::Index>(p);
    if (covariate_law == CovariateLaw::iid_normal) return VectorXd::Constant(P, cov_mean);
    return mvn_mean.size() == 0 ? VectorXd::Zero(P) : mvn_mean;
}

MatrixXd ExperimentConfig::covariate_second_moment() const {
    const auto P = static_cast<Eigen::Index>(p);
    const VectorXd mean = covariate_mean();
    if (covariate_law == CovariateLaw::iid_normal)
        return cov_var * MatrixXd::Identity(P, P) + mean * mean.transpose();
    return sigma + mean * mean.transpose();
}

MatrixXd equicorrelation(std::size_t p, double rho) {
    const auto P = static_cast<Eigen::Index>(p);
    MatrixXd s = MatrixXd::Constant(P, P, rho);
    s.diagonal().setOnes();
    return s;
}

ExperimentConfig experiment_config(ExperimentId id, std::uint64_t seed) {
    ExperimentConfig c;
    c.seed = seed;
    switch (id) {
        case ExperimentId::exp1:
            c.p = 3;
            c.beta0 = VectorXd::Ones(3);
            c.cov_mean = 10.0;
            c.cov_var = 2.0;
            c.var_lower = 0.0;
            c.var_upper = 3.0;
            c.m = 10;
            c.n = 10;
            break;
        case ExperimentId::exp2:
            c.p = 3;
            c.beta0 = VectorXd::Ones(3);
            c.mu_lower = 3.0;
            c.mu_upper = 5.0;
            c.var_upper = 4.0;
            c.m = 10;
            c.n = 20;
            break;
        case ExperimentId::exp3_indep:
        case ExperimentId::exp3_corr:
        case ExperimentId::exp4:
            c.p = 40;
            c.beta0 = VectorXd::Zero(40);
            c.beta0.head(5).setOnes();
            c.var_lower = 1.0;
            c.var_upper = 4.0;
            c.m = 10;
            c.n = 200;
            if (id == ExperimentId::exp3_corr) {
                c.covariate_law = CovariateLaw::multivariate_normal;
                c.sigma = equicorrelation(40, 0.5);
            }
            if (id == ExperimentId::exp4) {
                c.mu_lower = 5.0;
                c.mu_upper = 10.0;
            }
            break;
    }
    return c;
}

BlockErrors sample_block_errors(const ExperimentConfig& config) {
    config.validate();
    RandomStream family_rng(derive_seed(config.seed, {kFamily}));
    std::vector<FamilyMember> members(config.m);
    for (auto& member : members) {
        member.mean = family_rng.uniform(config.mu_lower, config.mu_upper);
        member.variance = family_rng.uniform(config.var_lower, config.var_upper);
    }
    DistributionFamily family(std::move(members));
    MatrixXd errors = sample_errors_for_family(family, config.n, derive_seed(config.seed, {kErrors}));
    return {std::move(errors), std::move(family)};
}

MatrixXd sample_errors_for_family(const DistributionFamily& family, std::size_t n, std::uint64_t seed) {
    MatrixXd errors(static_cast<Eigen::Index>(family.size()), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < family.size(); ++i) {
        RandomStream rng(derive_seed(seed, {i}));
        const double sd = std::sqrt(family[i].variance);
        for (std::size_t j = 0; j < n; ++j)
            errors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal(family[i].mean, sd);
    }
    return errors;
}

MatrixXd sample_covariates(const ExperimentConfig& config, std::uint64_t seed) {
    config.validate();
    const auto P = static_cast<Eigen::Index>(config.p);
    MatrixXd x(static_cast<Eigen::Index>(config.m * config.n), P);
    MatrixXd chol;
    VectorXd mean = config.covariate_mean();
    if (config.covariate_law == CovariateLaw::multivariate_normal) {
        Eigen::LLT<MatrixXd> llt(config.sigma);
        if (llt.info() != Eigen::Success) throw DomainError("covariate covariance is not positive definite");
        chol = llt.matrixL();
    }
    const double sd = std::sqrt(config.cov_var);
    VectorXd z(P);
    for (std::size_t i = 0; i < config.m; ++i) {
        RandomStream rng(derive_seed(seed, {i}));
        for (std::size_t j = 0; j < config.n; ++j) {
            const auto row = static_cast<Eigen::Index>(i * config.n + j);
            if (config.covariate_law == CovariateLaw::iid_normal) {
                for (Eigen::Index k = 0; k < P; ++k) x(row, k) = rng.normal(config.cov_mean, sd);
            } else {
                for (Eigen::Index k = 0; k < P; ++k) z(k) = rng.normal();
                x.row(row) = (mean + chol * z).transpose();
            }
        }
    }
    return x;
}

SimulatedData simulate_with_family(const ExperimentConfig& config, const DistributionFamily& family,
                                   std::uint64_t seed) {
    config.validate();
    if (family.size() != config.m) throw DomainError("family size must equal the block count");
    MatrixXd x = sample_covariates(config, derive_seed(seed, {kCovariates}));
    const MatrixXd errors = sample_errors_for_family(family, config.n, derive_seed(seed, {kErrors}));
    VectorXd y = x * config.beta0;
    for (std::size_t i = 0; i < config.m; ++i)
        for (std::size_t j = 0; j < config.n; ++j)
            y(static_cast<Eigen::Index>(i * config.n + j)) +=
                errors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    Dataset data(std::move(y), std::move(x), time_order_partition(config.m * config.n, config.m));
    return {std::move(data), config.beta0, family, config};
}

SimulatedData simulate(const ExperimentConfig& config) {
    const BlockErrors drawn = sample_block_errors(config);
    MatrixXd x = sample_covariates(config, derive_seed(config.seed, {kCovariates}));
    VectorXd y = x * config.beta0;
    for (std::size_t i = 0; i < config.m; ++i)
        for (std::size_t j = 0; j < config.n; ++j)
            y(static_cast<Eigen::Index>(i * config.n + j)) +=
                drawn.errors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    Dataset data(std::move(y), std::move(x), time_order_partition(config.m * config.n, config.m));
    return {std::move(data), config.beta0, drawn.truth, config};
}

SimulatedData make_experiment(ExperimentId id, std::uint64_t seed) {
    return simulate(experiment_config(id, seed));
}

}  // namespace sublinear
