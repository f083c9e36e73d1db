#pragma once

#include "sublinear/metrics.hpp"
#include "sublinear/minimax_solver.hpp"
#include "sublinear/simgen.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sublinear {

enum class Method { ols, minimax, profile, glasso, glasso_mu };

std::string to_string(Method method);
/// Throws DomainError for unknown names.
Method method_from_string(const std::string& name);
/// Comma-separated list of method names.
std::vector<Method> methods_from_string(const std::string& list);

struct BenchmarkOptions {
    std::string label;          ///< experiment name used in reports
    ExperimentConfig design;    ///< seed field is ignored; replications derive their own
    std::optional<DistributionFamily> fixed_family;  ///< reuse one family in every replication
    std::vector<Method> methods;
    std::size_t replications = 1;
    std::uint64_t seed = 0;
    SolverConfig solver;
    std::optional<double> lambda;  ///< penalized methods: fixed lambda, CV when absent
    std::size_t cv_folds = 5;
    std::size_t threads = 0;       ///< 0 uses the hardware concurrency
    double slack = 1e-6;           ///< additive slack of the exact inequality checks

    void validate() const;
};

/// Options for a named experiment.
BenchmarkOptions benchmark_options(ExperimentId id, std::vector<Method> methods, std::size_t replications,
                                   std::uint64_t seed);

struct MethodRecord {
    bool ok = false;
    std::string error;
    VectorXd beta;
    std::optional<double> mu_upper_hat;
    std::optional<double> lambda;
    double mpe_train = 0.0;
    double ape_train = 0.0;
    double mpe_fresh = 0.0;
    double ape_fresh = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    std::size_t selected = 0;
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
};

struct ReplicationRecord {
    std::size_t index = 0;
    bool failed = false;                ///< some method failed; excluded from aggregates
    std::vector<FamilyMember> family;
    std::vector<MethodRecord> methods;  ///< same order as the report's methods
    std::optional<bool> minimax_dominance;  ///< MPE(G) <= MPE(LS) and APE(G) >= APE(LS)
    std::optional<bool> shifted_dominance;  ///< MPE(profile, mu_hat) <= MPE(LS, 0)
};

struct MethodSummary {
    std::string method;
    VectorXd coefficient_mse;
    double mpe_train = 0.0;  ///< means over successful replications
    double ape_train = 0.0;
    double mpe_fresh = 0.0;
    double ape_fresh = 0.0;
    std::size_t converged = 0;
    double mean_selected = 0.0;
    double mean_false_positives = 0.0;
    double all_actives_rate = 0.0;  ///< share of replications selecting every true active
    double runtime_seconds = 0.0;
    std::optional<NormalityDiagnostics> normality;
};

struct BenchmarkReport {
    std::string experiment;
    std::uint64_t seed = 0;
    std::size_t replications = 0;
    std::size_t failed_replications = 0;
    std::vector<MethodSummary> methods;
    std::size_t minimax_dominance_checked = 0;
    std::size_t minimax_dominance_passed = 0;
    std::size_t shifted_dominance_checked = 0;
    std::size_t shifted_dominance_passed = 0;
    std::vector<ReplicationRecord> records;

    const MethodSummary* find(const std::string& method) const;
};

/// Runs the replications, each from its own stream derive_seed(seed, {r}), and
/// aggregates the metrics. Training metrics use the fitting sample; fresh
/// metrics use an independent sample with the same design and family.
BenchmarkReport run_benchmark(const BenchmarkOptions& options);

/// Plain-text table with MSE, MPE and APE rows per method.
std::string format_table(const BenchmarkReport& report);

}  // namespace sublinear
