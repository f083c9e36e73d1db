#pragma once

#include "sublinear/core_model.hpp"

#include <string>
#include <vector>

namespace sublinear {

enum class PartitionMode { time_order, by_response_descending, data_driven };

std::string to_string(PartitionMode mode);
PartitionMode partition_mode_from_string(const std::string& name);

struct PartitionConfig {
    PartitionMode mode = PartitionMode::time_order;
    std::size_t m0 = 0;  ///< initial block count; 0 derives it as N / n0
    std::size_t n0 = 0;  ///< initial block size; 0 derives it from m0, or max(p + 5, 20)
    double alpha = 0.05;

    /// Resolves (m0, n0) for N rows and p covariates and checks n0 > p, 0 < alpha < 1.
    void resolve(std::size_t n_rows, std::size_t p, std::size_t& m0_out, std::size_t& n0_out) const;
};

/// Block i holds rows i*n .. (i+1)*n - 1 with n = n_rows / m.
BlockPartition time_order_partition(std::size_t n_rows, std::size_t m);

/// Rows sorted by Y descending (stable), then cut into m consecutive blocks.
BlockPartition response_descending_partition(const Dataset& data, std::size_t m);

struct VarianceTestStep {
    std::size_t block = 0;        ///< candidate block (index into the initial partition)
    double rss = 0.0;
    double statistic = 0.0;       ///< F = v_next^2 / v_pooled^2
    double df_numerator = 0.0;
    double df_denominator = 0.0;
    double p_value = 0.0;         ///< P(F' <= statistic) under H0
    bool rejected = false;
};

struct BlockIdentification {
    std::vector<std::size_t> rows;           ///< estimated I_{i*}, ascending
    std::vector<std::size_t> merged_blocks;  ///< initial blocks merged, in merge order
    std::vector<std::size_t> order;          ///< initial blocks by descending RSS
    std::vector<double> block_rss;           ///< RSS of each initial block under OLS
    std::vector<VarianceTestStep> steps;
    std::size_t m0 = 0;
    std::size_t n0 = 0;
    std::vector<std::string> warnings;
};

/// Estimates the maximum-variance block: residuals from full-sample OLS,
/// initial blocks ordered by residual sum of squares, then blocks merged while
/// a one-sided F test of H0: sigma_next^2 = v^2 against sigma_next^2 < v^2 is
/// not rejected at level alpha. v^2 pools the residuals of the merged set.
BlockIdentification identify_max_variance_blocks(const Dataset& data, const PartitionConfig& config);

/// Partition chosen by `config.mode` with m blocks (data_driven splits the
/// identified set from the remaining rows).
BlockPartition make_partition(const Dataset& data, const PartitionConfig& config, std::size_t m);

/// Rows of `data` listed in `rows`, as a single block.
Dataset subset_rows(const Dataset& data, const std::vector<std::size_t>& rows);

}  // namespace sublinear
