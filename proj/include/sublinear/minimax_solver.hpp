#pragma once

#include "sublinear/core_model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sublinear {

enum class StepRule { polyak, diminishing };

struct SolverConfig {
    std::size_t max_iterations = 10000;  ///< budget of the subgradient stage
    double tolerance = 1e-8;             ///< relative optimality gap
    StepRule step_rule = StepRule::polyak;
    std::uint64_t seed = 0;              ///< kept for reproducible restarts; the solver itself is deterministic
    bool refine = true;                  ///< run the interior-point and active-set stages after subgradient

    void validate() const;
};

std::string to_string(StepRule rule);
StepRule step_rule_from_string(const std::string& name);

/// One block's mean squared residual as a quadratic:
/// f(b) = b' gram b - 2 cross' b + mean_square.
struct BlockQuadratic {
    MatrixXd gram;
    VectorXd cross;
    double mean_square = 0.0;

    double value(const VectorXd& b) const;
    VectorXd gradient(const VectorXd& b) const;
    /// f(b + d) - f(b), evaluated without cancellation against mean_square.
    double increment(const VectorXd& b, const VectorXd& d) const;
};

/// Penalized max-of-quadratics objective  max_i f_i(b) + lambda |b|_1.
class MinimaxProblem {
public:
    /// Block quadratics of `data` with responses replaced by y - shift.
    MinimaxProblem(const Dataset& data, double shift = 0.0);
    explicit MinimaxProblem(std::vector<BlockQuadratic> blocks);

    std::size_t block_count() const { return blocks_.size(); }
    std::size_t dim() const { return dim_; }
    const BlockQuadratic& block(std::size_t i) const { return blocks_.at(i); }

    VectorXd values(const VectorXd& b) const;
    double max_value(const VectorXd& b) const;
    double objective(const VectorXd& b, double lambda) const;

    /// max_i min_b f_i(b); a lower bound on the optimum for every lambda >= 0.
    double lower_bound() const { return lower_bound_; }

private:
    void init();

    std::vector<BlockQuadratic> blocks_;
    std::size_t dim_ = 0;
    double lower_bound_ = 0.0;
};

/// Index of the largest entry; entries within tie_tol of the max resolve to
/// the lowest index.
std::size_t argmax_lowest(const VectorXd& values, double tie_tol);

struct SolverOutcome {
    VectorXd beta;
    double objective = 0.0;
    std::size_t iterations = 0;  ///< subgradient iterations plus Newton steps
    bool converged = false;
    double gap = 0.0;
    double lower_bound = 0.0;
    std::string stage;
    std::vector<std::size_t> active_set;
    VectorXd weights;  ///< dual weights over blocks, empty when unavailable
};

/// Minimizes max_i f_i(b) + lambda |b|_1 from `start`.
///
/// Stage 1 is a (proximal) subgradient method using the active block's
/// gradient with Polyak or c/sqrt(k) steps. When one block stays active for 50
/// iterations its exact minimizer is tried; it is optimal for the whole
/// problem whenever that block is still the max there. Unless
/// `config.refine` is false, an uncertified result is then refined by a
/// log-barrier method on the epigraph form and polished by Newton's method on
/// the KKT system of the identified active blocks and support.
SolverOutcome solve_minimax(const MinimaxProblem& problem, double lambda, const VectorXd& start,
                            const SolverConfig& config);

/// Exact minimizer of f(b) + lambda |b|_1 for one quadratic by coordinate descent.
VectorXd single_block_lasso(const BlockQuadratic& q, double lambda, const VectorXd& start,
                            double tol = 1e-14, std::size_t max_sweeps = 200000);

/// Soft-threshold operator sign(v) max(|v| - t, 0), elementwise.
VectorXd soft_threshold(const VectorXd& v, double t);

}  // namespace sublinear
