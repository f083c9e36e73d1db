#pragma once

#include "sublinear/core_model.hpp"

#include <vector>

namespace sublinear {

/// log((a + x) / (b - x)). Throws DomainError naming the violated bound
/// unless a > 0, b > 1, a + x > 0 and b - x > 0.
double logit_transform(double x, double a = 1.0, double b = 101.0);

struct CenteredColumns {
    MatrixXd x;
    VectorXd means;
};

CenteredColumns center_columns(const MatrixXd& x);

struct RebalancePlan {
    std::size_t block_size = 0;
    /// Positions kept in the concatenation of the raw blocks, per block.
    std::vector<std::vector<std::size_t>> kept;
    std::vector<std::size_t> dropped;
};

/// Truncates every raw block to the smallest block size, keeping its earliest rows.
RebalancePlan rebalance_blocks(const std::vector<std::size_t>& raw_sizes);

struct RebalancedData {
    Dataset data;
    std::vector<std::size_t> dropped_rows;  ///< row indices of the input dataset
};

/// Applies the truncation to the blocks of `data`; rows keep their order.
RebalancedData rebalance_dataset(const Dataset& data);

}  // namespace sublinear
