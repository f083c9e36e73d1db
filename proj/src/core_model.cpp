#include "sublinear/core_model.hpp"

#include "sublinear/errors.hpp"
#include "sublinear/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace sublinear {

BlockPartition::BlockPartition(std::vector<std::vector<std::size_t>> blocks)
    : blocks_(std::move(blocks)) {
    std::vector<std::size_t> all;
    for (const auto& b : blocks_) {
        if (b.empty()) throw DomainError("block partition contains an empty block");
        all.insert(all.end(), b.begin(), b.end());
    }
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw DomainError("block partition assigns a row to more than one block");
}

BlockPartition BlockPartition::from_labels(std::span<const std::size_t> labels) {
    std::size_t m = 0;
    for (auto l : labels) m = std::max(m, l + 1);
    std::vector<std::vector<std::size_t>> blocks(m);
    for (std::size_t r = 0; r < labels.size(); ++r) blocks[labels[r]].push_back(r);
    return BlockPartition(std::move(blocks));
}

std::size_t BlockPartition::row_count() const {
    std::size_t n = 0;
    for (const auto& b : blocks_) n += b.size();
    return n;
}

bool BlockPartition::balanced() const {
    if (blocks_.empty()) return false;
    const auto n = blocks_.front().size();
    return std::all_of(blocks_.begin(), blocks_.end(),
                       [n](const auto& b) { return b.size() == n; });
}

std::size_t BlockPartition::balanced_size() const {
    if (!balanced()) throw UnbalancedPartitionError("unbalanced partition");
    return blocks_.front().size();
}

void BlockPartition::check_covers(std::size_t n_rows) const {
    if (row_count() != n_rows)
        throw DomainError("block partition does not cover every row exactly once");
    for (const auto& b : blocks_)
        for (auto r : b)
            if (r >= n_rows) throw DomainError("block partition references a row out of range");
}

std::vector<std::size_t> BlockPartition::labels(std::size_t n_rows) const {
    std::vector<std::size_t> out(n_rows, 0);
    for (std::size_t i = 0; i < blocks_.size(); ++i)
        for (auto r : blocks_[i]) out.at(r) = i;
    return out;
}

Dataset::Dataset(VectorXd y, MatrixXd x, BlockPartition blocks)
    : y_(std::move(y)), x_(std::move(x)), blocks_(std::move(blocks)) {
    if (x_.rows() != y_.size()) throw DomainError("response and covariate row counts differ");
    if (x_.cols() < 1) throw DomainError("dataset needs at least one covariate");
    if (!x_.allFinite()) throw DomainError("covariates contain non-finite values");
    if (!y_.allFinite()) throw DomainError("responses contain non-finite values");
    if (blocks_.block_count() == 0) throw DomainError("dataset needs at least one block");
    blocks_.check_covers(rows());
}

Dataset Dataset::with_blocks(BlockPartition blocks) const { return Dataset(y_, x_, std::move(blocks)); }

MatrixXd Dataset::block_x(std::size_t i) const {
    const auto& idx = blocks_.block(i);
    MatrixXd out(static_cast<Eigen::Index>(idx.size()), x_.cols());
    for (std::size_t j = 0; j < idx.size(); ++j)
        out.row(static_cast<Eigen::Index>(j)) = x_.row(static_cast<Eigen::Index>(idx[j]));
    return out;
}

VectorXd Dataset::block_y(std::size_t i) const {
    const auto& idx = blocks_.block(i);
    VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j)
        out(static_cast<Eigen::Index>(j)) = y_(static_cast<Eigen::Index>(idx[j]));
    return out;
}

Dataset Dataset::select_within_blocks(const std::vector<std::size_t>& positions) const {
    const auto m = block_count();
    const auto k = positions.size();
    VectorXd y(static_cast<Eigen::Index>(m * k));
    MatrixXd x(static_cast<Eigen::Index>(m * k), x_.cols());
    std::vector<std::vector<std::size_t>> blocks(m);
    std::size_t row = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& idx = blocks_.block(i);
        for (auto pos : positions) {
            if (pos >= idx.size()) throw DomainError("within-block position out of range");
            const auto src = static_cast<Eigen::Index>(idx[pos]);
            y(static_cast<Eigen::Index>(row)) = y_(src);
            x.row(static_cast<Eigen::Index>(row)) = x_.row(src);
            blocks[i].push_back(row);
            ++row;
        }
    }
    return Dataset(std::move(y), std::move(x), BlockPartition(std::move(blocks)));
}

DistributionFamily::DistributionFamily(std::vector<FamilyMember> members)
    : members_(std::move(members)) {
    if (members_.empty()) throw DomainError("empty distribution family");
    for (const auto& m : members_) {
        if (!std::isfinite(m.mean) || !std::isfinite(m.variance))
            throw DomainError("distribution family member is not finite");
        if (m.variance < 0.0) throw DomainError("distribution family variance is negative");
    }
}

UpperExpectation sublinear_expectation(const DistributionFamily& family,
                                       const MemberFunctional& functional) {
    if (family.size() == 0) throw DomainError("empty distribution family");
    UpperExpectation best{functional(family[0]), 0};
    for (std::size_t i = 1; i < family.size(); ++i) {
        const double v = functional(family[i]);
        if (v > best.value) best = {v, i};
    }
    return best;
}

SublinearMoments sublinear_moments(const DistributionFamily& family) {
    if (family.size() == 0) throw DomainError("empty distribution family");
    SublinearMoments out;
    out.mu_upper = out.mu_lower = family[0].mean;
    out.sigma2_upper = out.sigma2_lower = family[0].raw_second_moment();
    for (const auto& m : family.members()) {
        out.mu_upper = std::max(out.mu_upper, m.mean);
        out.mu_lower = std::min(out.mu_lower, m.mean);
        out.sigma2_upper = std::max(out.sigma2_upper, m.raw_second_moment());
        out.sigma2_lower = std::min(out.sigma2_lower, m.raw_second_moment());
    }
    return out;
}

VectorXd population_beta_mean_certain(const MatrixXd& exx, const VectorXd& ex_ce) {
    if (exx.rows() != ex_ce.size()) throw DomainError("dimension mismatch");
    const linalg::SpdFactor factor(exx, "covariate second-moment matrix not invertible");
    return factor.solve(ex_ce);
}

VectorXd population_beta_mean_uncertain(const MatrixXd& exx, const VectorXd& ex_ce,
                                        const VectorXd& ex, double mu_upper) {
    if (exx.rows() != ex_ce.size() || exx.rows() != ex.size())
        throw DomainError("dimension mismatch");
    const linalg::SpdFactor factor(exx, "covariate second-moment matrix not invertible");
    const VectorXd base = factor.solve(ex_ce);
    const VectorXd shift = factor.solve(ex);
    return base - mu_upper * shift;
}

}  // namespace sublinear
