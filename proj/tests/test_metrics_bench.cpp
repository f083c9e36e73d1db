#include "sublinear/bench.hpp"
#include "sublinear/errors.hpp"
#include "sublinear/estimators.hpp"
#include "sublinear/metrics.hpp"
#include "sublinear/partition.hpp"
#include "sublinear/random.hpp"

#include <doctest.h>

#include <algorithm>

using namespace sublinear;

namespace {

Dataset noisy(RandomStream& rng, std::size_t m, std::size_t n, std::size_t p) {
    MatrixXd x(static_cast<Eigen::Index>(m * n), static_cast<Eigen::Index>(p));
    VectorXd y(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index k = 0; k < x.cols(); ++k) x(r, k) = rng.normal();
        y(r) = x.row(r).sum() + rng.normal();
    }
    return Dataset(y, x, time_order_partition(m * n, m));
}

}  // namespace

TEST_SUITE("metrics_bench") {

TEST_CASE("perfect fit has zero prediction errors") {
    RandomStream rng(51);
    Dataset d = noisy(rng, 3, 5, 2);
    const VectorXd beta = (VectorXd(2) << 0.5, -1).finished();
    const Dataset exact(d.x() * beta, d.x(), d.blocks());
    CHECK(mpe(exact, beta) == 0.0);
    CHECK(ape(exact, beta) == 0.0);
}

TEST_CASE("mpe and ape compose block_mse") {
    RandomStream rng(52);
    const Dataset d = noisy(rng, 4, 6, 2);
    const VectorXd b = VectorXd::Ones(2) * 0.7;
    const VectorXd v = block_mse(d, b, 0.3);
    CHECK(mpe(d, b, 0.3) == v.maxCoeff());
    CHECK(ape(d, b, 0.3) == v.mean());
}

TEST_CASE("one block collapses mpe to ape") {
    RandomStream rng(53);
    const Dataset d = noisy(rng, 1, 10, 2);
    CHECK(mpe(d, VectorXd::Zero(2)) == doctest::Approx(ape(d, VectorXd::Zero(2))).epsilon(1e-15));
}

TEST_CASE("ape equals the flat mean of squared residuals for balanced blocks") {
    RandomStream rng(54);
    for (int t = 0; t < 20; ++t) {
        const Dataset d = noisy(rng, 5, 8, 3);
        VectorXd b(3);
        b << rng.normal(), rng.normal(), rng.normal();
        const double flat = (d.y() - d.x() * b).array().square().mean();
        CHECK(std::abs(ape(d, b) - flat) <= 1e-12 * std::max(1.0, flat));
    }
}

TEST_CASE("mpe requires balanced blocks") {
    const Dataset d(VectorXd::Ones(3), MatrixXd::Ones(3, 1), BlockPartition({{0, 1}, {2}}));
    CHECK_THROWS_AS(mpe(d, VectorXd::Zero(1)), UnbalancedPartitionError);
    CHECK_THROWS_AS(ape(d, VectorXd::Zero(1)), UnbalancedPartitionError);
}

TEST_CASE("coefficient mse examples") {
    const VectorXd b0 = (VectorXd(3) << 1, 2, 3).finished();
    MatrixXd est(2, 3);
    est << 1, 2, 3, 1, 2, 3;
    CHECK(coefficient_mse(est, b0).isZero(0.0));
    est << 1.25, 2, 3, 0.75, 2, 3;
    const VectorXd m = coefficient_mse(est, b0);
    CHECK(m(0) == 0.0625);
    CHECK(m(1) == 0.0);
    CHECK(m(2) == 0.0);
    CHECK_THROWS_AS(coefficient_mse(MatrixXd(0, 3), b0), DomainError);
}

TEST_CASE("normality check on draws from the target law") {
    const MatrixXd exx = (MatrixXd(2, 2) << 2.0, 0.5, 0.5, 1.0).finished();
    const double sigma2 = 3.0;
    const double n = 400;
    const MatrixXd cov = sigma2 * exx.inverse();
    const Eigen::LLT<MatrixXd> llt(cov);
    const VectorXd beta0 = (VectorXd(2) << 1, -1).finished();
    double prev = 1e300;
    for (Eigen::Index r : {200, 5000}) {
        RandomStream rng(55);
        MatrixXd est(r, 2);
        for (Eigen::Index i = 0; i < r; ++i) {
            const VectorXd z = (VectorXd(2) << rng.normal(), rng.normal()).finished();
            est.row(i) = (beta0 + llt.matrixL() * z / std::sqrt(n)).transpose();
        }
        const NormalityDiagnostics diag = normality_check(est, beta0, n, sigma2, exx);
        CHECK(diag.relative_frobenius < 4.0 / std::sqrt(static_cast<double>(r)));
        CHECK(diag.target.isApprox(cov, 1e-12));
        CHECK(diag.skewness.cwiseAbs().maxCoeff() < 0.5);
        CHECK(diag.excess_kurtosis.cwiseAbs().maxCoeff() < 1.0);
        CHECK(diag.relative_frobenius < prev);
        prev = diag.relative_frobenius;
    }
}

TEST_CASE("scalar normality target is the variance") {
    RandomStream rng(56);
    MatrixXd est(100, 1);
    for (Eigen::Index i = 0; i < 100; ++i) est(i, 0) = rng.normal() * 2.0 / 10.0;
    const auto diag = normality_check(est, VectorXd::Zero(1), 100.0, 4.0, MatrixXd::Identity(1, 1));
    CHECK(diag.target(0, 0) == 4.0);
    CHECK(diag.relative_frobenius < 0.4);
}

TEST_CASE("normality check needs at least 100 replications") {
    CHECK_THROWS_AS(normality_check(MatrixXd::Zero(99, 1), VectorXd::Zero(1), 10.0, 1.0, MatrixXd::Identity(1, 1)),
                    DomainError);
}

TEST_CASE("ordered sum is permutation invariant") {
    RandomStream rng(57);
    std::vector<double> v(1000);
    for (auto& x : v) x = rng.normal() * std::pow(10.0, rng.uniform(-8, 8));
    const double ref = ordered_sum(v);
    for (int t = 0; t < 10; ++t) {
        std::shuffle(v.begin(), v.end(), rng.engine());
        CHECK(ordered_sum(v) == ref);
    }
}

TEST_CASE("method names") {
    CHECK(method_from_string("profile") == Method::profile);
    CHECK(methods_from_string("ols,minimax") == std::vector<Method>{Method::ols, Method::minimax});
    CHECK_THROWS_AS(method_from_string("ridge"), DomainError);
    for (auto m : {Method::ols, Method::minimax, Method::profile, Method::glasso, Method::glasso_mu})
        CHECK(method_from_string(to_string(m)) == m);
}

TEST_CASE("single ols replication") {
    const BenchmarkReport rep = run_benchmark(benchmark_options(ExperimentId::exp1, {Method::ols}, 1, 3));
    CHECK(rep.replications == 1);
    REQUIRE(rep.records.size() == 1);
    REQUIRE(rep.methods.size() == 1);
    CHECK(rep.methods[0].method == "ols");
    CHECK(rep.records[0].methods[0].ok);
    CHECK(rep.methods[0].mpe_train == doctest::Approx(rep.records[0].methods[0].mpe_train));
    CHECK_FALSE(rep.records[0].minimax_dominance.has_value());
    CHECK(rep.methods[0].mpe_train >= rep.methods[0].ape_train);
}

TEST_CASE("benchmark validation") {
    BenchmarkOptions o = benchmark_options(ExperimentId::exp1, {Method::ols}, 0, 1);
    CHECK_THROWS_AS(o.validate(), DomainError);
    o = benchmark_options(ExperimentId::exp1, {}, 3, 1);
    CHECK_THROWS_AS(o.validate(), DomainError);
}

TEST_CASE("dominance checks on every exp1 replication") {
    const BenchmarkReport rep =
        run_benchmark(benchmark_options(ExperimentId::exp1, {Method::minimax, Method::ols}, 20, 8));
    CHECK(rep.failed_replications == 0);
    CHECK(rep.minimax_dominance_checked == 20);
    CHECK(rep.minimax_dominance_passed == 20);
    CHECK(rep.minimax_dominance_passed <= rep.replications);
    for (const auto& m : rep.methods) {
        CHECK(m.mpe_train >= 0.0);
        CHECK(m.ape_fresh >= 0.0);
        CHECK((m.coefficient_mse.array() >= 0.0).all());
    }
}

TEST_CASE("shifted dominance on exp2") {
    const BenchmarkReport rep =
        run_benchmark(benchmark_options(ExperimentId::exp2, {Method::profile, Method::ols}, 10, 9));
    CHECK(rep.shifted_dominance_checked == 10);
    CHECK(rep.shifted_dominance_passed == 10);
}

TEST_CASE("results do not depend on the thread count") {
    BenchmarkOptions a = benchmark_options(ExperimentId::exp1, {Method::minimax, Method::ols}, 6, 10);
    a.threads = 1;
    BenchmarkOptions b = a;
    b.threads = 3;
    const std::string ta = format_table(run_benchmark(a));
    const std::string tb = format_table(run_benchmark(b));
    CHECK(ta == tb);
    CHECK(ta.find("MPE") != std::string::npos);
}

TEST_CASE("aggregates equal a manual recomputation from the records") {
    const BenchmarkReport rep = run_benchmark(benchmark_options(ExperimentId::exp2, {Method::ols}, 12, 4));
    std::vector<double> v;
    for (const auto& r : rep.records) v.push_back(r.methods[0].ape_fresh);
    CHECK(rep.methods[0].ape_fresh == doctest::Approx(ordered_sum(v) / 12.0).epsilon(1e-14));
    std::reverse(v.begin(), v.end());
    CHECK(ordered_sum(v) / 12.0 == doctest::Approx(rep.methods[0].ape_fresh).epsilon(1e-14));
}

}  // TEST_SUITE
