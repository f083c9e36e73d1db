#include "sublinear/partition.hpp"

#include "sublinear/errors.hpp"
#include "sublinear/estimators.hpp"

#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <numeric>

namespace sublinear {

std::string to_string(PartitionMode mode) {
    switch (mode) {
        case PartitionMode::time_order: return "time_order";
        case PartitionMode::by_response_descending: return "by_response_descending";
        case PartitionMode::data_driven: return "data_driven";
    }
    return "time_order";
}

PartitionMode partition_mode_from_string(const std::string& name) {
    if (name == "time_order") return PartitionMode::time_order;
    if (name == "by_response_descending") return PartitionMode::by_response_descending;
    if (name == "data_driven") return PartitionMode::data_driven;
    throw DomainError("unknown partition mode '" + name + "'");
}

void PartitionConfig::resolve(std::size_t n_rows, std::size_t p, std::size_t& m0_out,
                              std::size_t& n0_out) const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie strictly between 0 and 1");
    std::size_t n = n0;
    std::size_t m = m0;
    if (n == 0 && m == 0) n = std::max<std::size_t>(p + 5, 20);
    if (n == 0) {
        if (n_rows % m != 0) throw UnbalancedPartitionError("unbalanced partition");
        n = n_rows / m;
    }
    if (n <= p) throw DomainError("initial block size n0 must exceed the number of covariates");
    if (m == 0) m = n_rows / n;
    if (m == 0 || m * n != n_rows) throw UnbalancedPartitionError("unbalanced partition");
    m0_out = m;
    n0_out = n;
}

BlockPartition time_order_partition(std::size_t n_rows, std::size_t m) {
    if (m == 0 || n_rows == 0 || n_rows % m != 0) throw UnbalancedPartitionError("unbalanced partition");
    const std::size_t n = n_rows / m;
    std::vector<std::vector<std::size_t>> blocks(m);
    for (std::size_t i = 0; i < m; ++i) {
        blocks[i].resize(n);
        std::iota(blocks[i].begin(), blocks[i].end(), i * n);
    }
    return BlockPartition(std::move(blocks));
}

BlockPartition response_descending_partition(const Dataset& data, std::size_t m) {
    const std::size_t n_rows = data.rows();
    if (m == 0 || n_rows % m != 0) throw UnbalancedPartitionError("unbalanced partition");
    std::vector<std::size_t> order(n_rows);
    std::iota(order.begin(), order.end(), 0);
    const VectorXd& y = data.y();
    std::stable_sort(order.begin(), order.end(), [&y](std::size_t a, std::size_t b) {
        return y(static_cast<Eigen::Index>(a)) > y(static_cast<Eigen::Index>(b));
    });
    const std::size_t n = n_rows / m;
    std::vector<std::vector<std::size_t>> blocks(m);
    for (std::size_t i = 0; i < m; ++i)
        blocks[i].assign(order.begin() + static_cast<std::ptrdiff_t>(i * n),
                         order.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
    return BlockPartition(std::move(blocks));
}

BlockIdentification identify_max_variance_blocks(const Dataset& data, const PartitionConfig& config) {
    BlockIdentification out;
    const std::size_t p = data.dim();
    config.resolve(data.rows(), p, out.m0, out.n0);
    const BlockPartition initial = time_order_partition(data.rows(), out.m0);

    const FitResult ls = ols_fit(data);
    const VectorXd resid = data.y() - data.x() * ls.beta;
    out.block_rss.resize(out.m0);
    for (std::size_t i = 0; i < out.m0; ++i) {
        double s = 0.0;
        for (auto r : initial.block(i)) s += resid(static_cast<Eigen::Index>(r)) * resid(static_cast<Eigen::Index>(r));
        out.block_rss[i] = s;
    }
    out.order.resize(out.m0);
    std::iota(out.order.begin(), out.order.end(), 0);
    std::stable_sort(out.order.begin(), out.order.end(),
                     [&](std::size_t a, std::size_t b) { return out.block_rss[a] > out.block_rss[b]; });

    out.merged_blocks.push_back(out.order.front());
    double pooled_rss = out.block_rss[out.order.front()];
    std::size_t pooled_rows = out.n0;
    if (out.m0 < 2) out.warnings.push_back("only one initial block; nothing to test");

    const double df_next = static_cast<double>(out.n0 - p);
    for (std::size_t k = 1; k < out.m0; ++k) {
        const std::size_t b = out.order[k];
        VarianceTestStep step;
        step.block = b;
        step.rss = out.block_rss[b];
        step.df_numerator = df_next;
        step.df_denominator = static_cast<double>(pooled_rows - p);
        const double v_next = step.rss / step.df_numerator;
        const double v_pool = pooled_rss / step.df_denominator;
        step.statistic = v_pool > 0.0 ? v_next / v_pool : 1.0;
        const boost::math::fisher_f dist(step.df_numerator, step.df_denominator);
        step.p_value = boost::math::cdf(dist, step.statistic);
        step.rejected = step.p_value < config.alpha;
        out.steps.push_back(step);
        if (step.rejected) break;
        out.merged_blocks.push_back(b);
        pooled_rss += step.rss;
        pooled_rows += out.n0;
    }

    for (auto b : out.merged_blocks)
        out.rows.insert(out.rows.end(), initial.block(b).begin(), initial.block(b).end());
    std::sort(out.rows.begin(), out.rows.end());
    return out;
}

BlockPartition make_partition(const Dataset& data, const PartitionConfig& config, std::size_t m) {
    switch (config.mode) {
        case PartitionMode::time_order: return time_order_partition(data.rows(), m);
        case PartitionMode::by_response_descending: return response_descending_partition(data, m);
        case PartitionMode::data_driven: {
            const BlockIdentification id = identify_max_variance_blocks(data, config);
            std::vector<bool> in(data.rows(), false);
            for (auto r : id.rows) in[r] = true;
            std::vector<std::size_t> rest;
            for (std::size_t r = 0; r < data.rows(); ++r)
                if (!in[r]) rest.push_back(r);
            std::vector<std::vector<std::size_t>> blocks{id.rows};
            if (!rest.empty()) blocks.push_back(std::move(rest));
            return BlockPartition(std::move(blocks));
        }
    }
    return time_order_partition(data.rows(), m);
}

Dataset subset_rows(const Dataset& data, const std::vector<std::size_t>& rows) {
    if (rows.empty()) throw DomainError("empty row subset");
    VectorXd y(static_cast<Eigen::Index>(rows.size()));
    MatrixXd x(static_cast<Eigen::Index>(rows.size()), data.x().cols());
    std::vector<std::size_t> block(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j] >= data.rows()) throw DomainError("row index out of range");
        y(static_cast<Eigen::Index>(j)) = data.y()(static_cast<Eigen::Index>(rows[j]));
        x.row(static_cast<Eigen::Index>(j)) = data.x().row(static_cast<Eigen::Index>(rows[j]));
        block[j] = j;
    }
    return Dataset(std::move(y), std::move(x), BlockPartition({block}));
}

}  // namespace sublinear
