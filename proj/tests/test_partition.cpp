#include "sublinear/errors.hpp"
#include "sublinear/partition.hpp"
#include "sublinear/random.hpp"

#include <doctest.h>

#include <algorithm>

using namespace sublinear;

namespace {

/// m0 blocks of n0 rows, p standard normal covariates, y = sum(x) + sd_i * N(0,1).
Dataset planted(RandomStream& rng, std::size_t m0, std::size_t n0, std::size_t p, const std::vector<double>& sd) {
    const std::size_t rows = m0 * n0;
    MatrixXd x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
    VectorXd y(static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < m0; ++i)
        for (std::size_t j = 0; j < n0; ++j) {
            const auto r = static_cast<Eigen::Index>(i * n0 + j);
            double s = 0.0;
            for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(p); ++k) s += (x(r, k) = rng.normal());
            y(r) = s + sd[i] * rng.normal();
        }
    return Dataset(y, x, time_order_partition(rows, m0));
}

PartitionConfig config(std::size_t m0, std::size_t n0, double alpha) {
    PartitionConfig c;
    c.mode = PartitionMode::data_driven;
    c.m0 = m0;
    c.n0 = n0;
    c.alpha = alpha;
    return c;
}

}  // namespace

TEST_SUITE("partition") {

TEST_CASE("time order partition of six rows into three blocks") {
    const BlockPartition bp = time_order_partition(6, 3);
    CHECK(bp.blocks() == std::vector<std::vector<std::size_t>>{{0, 1}, {2, 3}, {4, 5}});
}

TEST_CASE("time order partition with one block") {
    CHECK(time_order_partition(4, 1).blocks() == std::vector<std::vector<std::size_t>>{{0, 1, 2, 3}});
}

TEST_CASE("time order partition rejects indivisible sizes") {
    CHECK_THROWS_WITH_AS(time_order_partition(7, 2), "unbalanced partition", UnbalancedPartitionError);
    CHECK_THROWS_AS(time_order_partition(4, 0), UnbalancedPartitionError);
}

TEST_CASE("response descending partition") {
    const Dataset d((VectorXd(4) << 3, 1, 2, 4).finished(), MatrixXd::Ones(4, 1), BlockPartition({{0, 1, 2, 3}}));
    const BlockPartition bp = response_descending_partition(d, 2);
    CHECK(bp.block(0) == std::vector<std::size_t>{3, 0});
    CHECK(bp.block(1) == std::vector<std::size_t>{2, 1});
    CHECK_THROWS_AS(response_descending_partition(d, 3), UnbalancedPartitionError);
}

TEST_CASE("equal responses give the time order partition") {
    const Dataset d(VectorXd::Constant(6, 2.0), MatrixXd::Ones(6, 1), BlockPartition({{0, 1, 2, 3, 4, 5}}));
    CHECK(response_descending_partition(d, 3) == time_order_partition(6, 3));
}

TEST_CASE("response descending blocks are sorted") {
    RandomStream rng(21);
    for (int t = 0; t < 20; ++t) {
        VectorXd y(40);
        for (Eigen::Index r = 0; r < 40; ++r) y(r) = rng.normal();
        const Dataset d(y, MatrixXd::Ones(40, 1), time_order_partition(40, 1));
        const BlockPartition bp = response_descending_partition(d, 4);
        for (std::size_t i = 0; i + 1 < 4; ++i) {
            double lo = 1e300, hi = -1e300;
            for (auto r : bp.block(i)) lo = std::min(lo, y(static_cast<Eigen::Index>(r)));
            for (auto r : bp.block(i + 1)) hi = std::max(hi, y(static_cast<Eigen::Index>(r)));
            CHECK(lo >= hi);
        }
    }
}

TEST_CASE("configuration resolution and validation") {
    std::size_t m0 = 0, n0 = 0;
    PartitionConfig c;
    c.resolve(200, 3, m0, n0);
    CHECK(n0 == 20);
    CHECK(m0 == 10);
    c.n0 = 3;
    CHECK_THROWS_AS(c.resolve(30, 3, m0, n0), DomainError);
    c.n0 = 0;
    c.alpha = 1.0;
    CHECK_THROWS_AS(c.resolve(200, 3, m0, n0), DomainError);
    c.alpha = 0.05;
    c.m0 = 7;
    CHECK_THROWS_AS(c.resolve(200, 3, m0, n0), UnbalancedPartitionError);
    CHECK(partition_mode_from_string("data_driven") == PartitionMode::data_driven);
    CHECK_THROWS_AS(partition_mode_from_string("cluster"), DomainError);
}

TEST_CASE("single initial block is returned unchanged with a warning") {
    RandomStream rng(22);
    const Dataset d = planted(rng, 1, 30, 2, {1.0});
    const BlockIdentification id = identify_max_variance_blocks(d, config(1, 30, 0.05));
    CHECK(id.rows.size() == 30);
    CHECK(id.merged_blocks == std::vector<std::size_t>{0});
    CHECK_FALSE(id.warnings.empty());
}

TEST_CASE("identification invariants") {
    RandomStream rng(23);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> sd(6);
        for (auto& s : sd) s = 0.5 + 2.0 * rng.uniform();
        const Dataset d = planted(rng, 6, 25, 2, sd);
        const BlockIdentification id = identify_max_variance_blocks(d, config(6, 25, 0.05));
        REQUIRE(id.order.size() == 6);
        CHECK(id.merged_blocks.front() == id.order.front());
        for (std::size_t k = 0; k + 1 < id.order.size(); ++k)
            CHECK(id.block_rss[id.order[k]] >= id.block_rss[id.order[k + 1]]);
        // merged blocks are a prefix of the descending order
        for (std::size_t k = 0; k < id.merged_blocks.size(); ++k) CHECK(id.merged_blocks[k] == id.order[k]);
        CHECK(id.rows.size() == 25 * id.merged_blocks.size());
        CHECK(std::is_sorted(id.rows.begin(), id.rows.end()));
        // a rejection ends the loop
        for (std::size_t k = 0; k + 1 < id.steps.size(); ++k) CHECK_FALSE(id.steps[k].rejected);
        for (const auto& s : id.steps) {
            CHECK(s.df_numerator == doctest::Approx(23.0));
            CHECK(s.p_value >= 0.0);
            CHECK(s.p_value <= 1.0);
        }
    }
}

TEST_CASE("alpha limits merge everything or nothing") {
    RandomStream rng(24);
    const Dataset d = planted(rng, 5, 30, 2, {1.0, 1.2, 3.0, 0.8, 1.5});
    const auto all = identify_max_variance_blocks(d, config(5, 30, 1e-300));
    CHECK(all.merged_blocks.size() == 5);
    const auto top = identify_max_variance_blocks(d, config(5, 30, 1.0 - 1e-15));
    CHECK(top.merged_blocks.size() == 1);
    CHECK(top.merged_blocks.front() == 2);
}

TEST_CASE("homogeneous blocks mostly merge") {
    RandomStream rng(25);
    std::size_t merged = 0;
    const int runs = 40;
    for (int t = 0; t < runs; ++t) {
        const Dataset d = planted(rng, 6, 30, 2, std::vector<double>(6, 1.0));
        const auto id = identify_max_variance_blocks(d, config(6, 30, 0.05));
        CHECK(id.rows.size() >= 30);
        merged += id.merged_blocks.size();
    }
    CHECK(static_cast<double>(merged) / runs > 2.0);
}

TEST_CASE("data driven partition splits the identified set from the rest") {
    RandomStream rng(26);
    const Dataset d = planted(rng, 4, 30, 2, {1.0, 4.0, 1.0, 1.0});
    PartitionConfig c = config(4, 30, 0.05);
    const auto id = identify_max_variance_blocks(d, c);
    const BlockPartition bp = make_partition(d, c, 2);
    CHECK(bp.block_count() == 2);
    CHECK(bp.row_count() == 120);
    CHECK(bp.block(0) == id.rows);
    c.mode = PartitionMode::time_order;
    CHECK(make_partition(d, c, 4) == time_order_partition(120, 4));
}

TEST_CASE("subset rows keeps the listed rows in order") {
    const Dataset d((VectorXd(4) << 1, 2, 3, 4).finished(), MatrixXd::Ones(4, 1), time_order_partition(4, 2));
    const Dataset s = subset_rows(d, {3, 1});
    CHECK(s.rows() == 2);
    CHECK(s.y()(0) == 4.0);
    CHECK(s.y()(1) == 2.0);
    CHECK_THROWS_AS(subset_rows(d, {}), DomainError);
}

}  // TEST_SUITE
