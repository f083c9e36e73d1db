#include "sublinear/preprocess.hpp"

#include "sublinear/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sublinear {

double logit_transform(double x, double a, double b) {
    if (!(a > 0.0)) throw DomainError("logit transform needs a > 0");
    if (!(b > 1.0)) throw DomainError("logit transform needs b > 1");
    if (!(a + x > 0.0)) throw DomainError("logit transform needs a + x > 0 (lower bound violated)");
    if (!(b - x > 0.0)) throw DomainError("logit transform needs b - x > 0 (upper bound violated)");
    return std::log((a + x) / (b - x));
}

CenteredColumns center_columns(const MatrixXd& x) {
    if (x.rows() < 1) throw DomainError("centering needs at least one row");
    CenteredColumns out;
    out.means = x.colwise().mean().transpose();
    out.x = x.rowwise() - out.means.transpose();
    return out;
}

RebalancePlan rebalance_blocks(const std::vector<std::size_t>& raw_sizes) {
    if (raw_sizes.empty()) throw DomainError("no blocks to rebalance");
    for (auto s : raw_sizes)
        if (s < 1) throw DomainError("raw block sizes must be at least 1");
    RebalancePlan plan;
    plan.block_size = *std::min_element(raw_sizes.begin(), raw_sizes.end());
    std::size_t offset = 0;
    for (auto s : raw_sizes) {
        std::vector<std::size_t> kept;
        for (std::size_t j = 0; j < s; ++j) {
            if (j < plan.block_size)
                kept.push_back(offset + j);
            else
                plan.dropped.push_back(offset + j);
        }
        plan.kept.push_back(std::move(kept));
        offset += s;
    }
    return plan;
}

RebalancedData rebalance_dataset(const Dataset& data) {
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < data.block_count(); ++i) sizes.push_back(data.blocks().block_size(i));
    const RebalancePlan plan = rebalance_blocks(sizes);

    std::vector<std::size_t> keep_rows;
    std::vector<std::vector<std::size_t>> blocks(data.block_count());
    std::vector<std::size_t> dropped;
    for (std::size_t i = 0; i < data.block_count(); ++i) {
        const auto& rows = data.blocks().block(i);
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (j < plan.block_size)
                keep_rows.push_back(rows[j]);
            else
                dropped.push_back(rows[j]);
        }
    }
    std::sort(keep_rows.begin(), keep_rows.end());
    std::sort(dropped.begin(), dropped.end());
    const std::vector<std::size_t> labels = data.blocks().labels(data.rows());

    VectorXd y(static_cast<Eigen::Index>(keep_rows.size()));
    MatrixXd x(static_cast<Eigen::Index>(keep_rows.size()), data.x().cols());
    for (std::size_t k = 0; k < keep_rows.size(); ++k) {
        const auto src = static_cast<Eigen::Index>(keep_rows[k]);
        y(static_cast<Eigen::Index>(k)) = data.y()(src);
        x.row(static_cast<Eigen::Index>(k)) = data.x().row(src);
        blocks[labels[keep_rows[k]]].push_back(k);
    }
    return {Dataset(std::move(y), std::move(x), BlockPartition(std::move(blocks))), std::move(dropped)};
}

}  // namespace sublinear
