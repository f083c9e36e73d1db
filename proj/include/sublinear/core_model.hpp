#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sublinear {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Disjoint, non-empty groups of row indices (0-based). Rows inside a group
/// keep the order in which they were supplied; that order is the time order.
class BlockPartition {
public:
    BlockPartition() = default;
    explicit BlockPartition(std::vector<std::vector<std::size_t>> blocks);

    /// Builds the partition from one 0-based label per row; rows keep input order.
    static BlockPartition from_labels(std::span<const std::size_t> labels);

    std::size_t block_count() const { return blocks_.size(); }
    const std::vector<std::size_t>& block(std::size_t i) const { return blocks_.at(i); }
    const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
    std::size_t block_size(std::size_t i) const { return blocks_.at(i).size(); }
    std::size_t row_count() const;

    bool balanced() const;
    /// Common block size; throws UnbalancedPartitionError when sizes differ.
    std::size_t balanced_size() const;

    /// Throws unless the groups cover exactly {0, ..., n_rows - 1}.
    void check_covers(std::size_t n_rows) const;

    /// Block label of every row.
    std::vector<std::size_t> labels(std::size_t n_rows) const;

    bool operator==(const BlockPartition&) const = default;

private:
    std::vector<std::vector<std::size_t>> blocks_;
};

/// Responses, covariates and the block structure of a sample.
class Dataset {
public:
    Dataset(VectorXd y, MatrixXd x, BlockPartition blocks);

    const VectorXd& y() const { return y_; }
    const MatrixXd& x() const { return x_; }
    const BlockPartition& blocks() const { return blocks_; }
    std::size_t rows() const { return static_cast<std::size_t>(y_.size()); }
    std::size_t dim() const { return static_cast<std::size_t>(x_.cols()); }
    std::size_t block_count() const { return blocks_.block_count(); }

    Dataset with_blocks(BlockPartition blocks) const;
    /// Rows of one block, in block order.
    MatrixXd block_x(std::size_t i) const;
    VectorXd block_y(std::size_t i) const;

    /// New dataset holding the listed rows of every block (indices are
    /// positions inside each block). Blocks keep their identity and order.
    Dataset select_within_blocks(const std::vector<std::size_t>& positions) const;

private:
    VectorXd y_;
    MatrixXd x_;
    BlockPartition blocks_;
};

struct FamilyMember {
    double mean = 0.0;
    double variance = 0.0;

    double raw_second_moment() const { return variance + mean * mean; }
};

/// Finite family of linear expectations, one (mean, variance) law per block.
class DistributionFamily {
public:
    explicit DistributionFamily(std::vector<FamilyMember> members);

    std::size_t size() const { return members_.size(); }
    const FamilyMember& operator[](std::size_t i) const { return members_.at(i); }
    const std::vector<FamilyMember>& members() const { return members_; }

private:
    std::vector<FamilyMember> members_;
};

struct SublinearMoments {
    double mu_upper = 0.0;
    double mu_lower = 0.0;
    double sigma2_upper = 0.0;  ///< max of raw second moments
    double sigma2_lower = 0.0;  ///< min of raw second moments
};

/// Value of the upper expectation together with the member attaining it.
struct UpperExpectation {
    double value = 0.0;
    std::size_t member = 0;
};

/// Maps a family member to the linear expectation E_f[g] of a fixed g.
using MemberFunctional = std::function<double(const FamilyMember&)>;

/// max_f E_f[g] over the family; ties go to the lowest member index.
UpperExpectation sublinear_expectation(const DistributionFamily& family,
                                       const MemberFunctional& functional);

SublinearMoments sublinear_moments(const DistributionFamily& family);

/// beta = E[xx']^{-1} E{x E[Y|x]}.
VectorXd population_beta_mean_certain(const MatrixXd& exx, const VectorXd& ex_ce);

/// beta = E[xx']^{-1} E{x E[Y|x]} - mu_upper E[xx']^{-1} E[x].
VectorXd population_beta_mean_uncertain(const MatrixXd& exx, const VectorXd& ex_ce,
                                        const VectorXd& ex, double mu_upper);

/// Solver and fit diagnostics carried alongside a FitResult.
struct FitDiagnostics {
    std::string method;
    std::string stage;                     ///< solver stage that produced beta
    double optimality_gap = 0.0;           ///< certified upper bound on objective - optimum
    double lower_bound = 0.0;
    std::vector<std::size_t> tied_blocks;  ///< blocks within 1e-12 of the max at beta
    std::vector<std::size_t> active_set;   ///< blocks carrying positive dual weight
    std::vector<double> block_mse;
    std::optional<double> lambda;
    std::vector<bool> selected;            ///< empty unless a penalty was applied
    std::optional<std::size_t> mu_block;   ///< block attaining the upper-mean estimate
    std::vector<std::string> warnings;
};

struct FitResult {
    VectorXd beta;
    std::optional<double> mu_upper_hat;
    double objective_value = 0.0;
    std::size_t active_block = 0;  ///< 0-based here, 1-based in serialized output
    std::size_t iterations = 0;
    bool converged = false;
    FitDiagnostics diagnostics;
};

}  // namespace sublinear
