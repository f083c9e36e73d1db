#include "sublinear/errors.hpp"
#include "sublinear/random.hpp"
#include "sublinear/simgen.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <set>

using namespace sublinear;

TEST_SUITE("simgen") {

TEST_CASE("seed derivation is deterministic and separates id paths") {
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    std::set<std::uint64_t> seen;
    for (std::uint64_t a = 0; a < 20; ++a)
        for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(7, {a, b}));
    CHECK(seen.size() == 400);
    CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
}

TEST_CASE("random stream moments") {
    RandomStream rng(77);
    double s = 0.0, s2 = 0.0, u = 0.0;
    const int count = 200000;
    for (int i = 0; i < count; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
        const double v = rng.uniform();
        CHECK_FALSE((v < 0.0 || v >= 1.0));
        u += v;
    }
    CHECK(std::abs(s / count) < 0.01);
    CHECK(std::abs(s2 / count - 1.0) < 0.015);
    CHECK(std::abs(u / count - 0.5) < 0.005);
}

TEST_CASE("degenerate error ranges give constant errors") {
    ExperimentConfig c = experiment_config(ExperimentId::exp1, 3);
    c.var_lower = c.var_upper = 0.0;
    c.mu_lower = c.mu_upper = 2.5;
    const BlockErrors e = sample_block_errors(c);
    CHECK((e.errors.array() == 2.5).all());
    for (const auto& f : e.truth.members()) {
        CHECK(f.mean == 2.5);
        CHECK(f.variance == 0.0);
    }
}

TEST_CASE("generation is a pure function of the seed") {
    for (auto id : {ExperimentId::exp1, ExperimentId::exp2, ExperimentId::exp3_corr, ExperimentId::exp4}) {
        const SimulatedData a = make_experiment(id, 11);
        const SimulatedData b = make_experiment(id, 11);
        CHECK(a.data.y() == b.data.y());
        CHECK(a.data.x() == b.data.x());
        const SimulatedData c = make_experiment(id, 12);
        CHECK(a.data.y() != c.data.y());
    }
}

TEST_CASE("fixed-family generation reuses the stream layout of simulate") {
    const ExperimentConfig c = experiment_config(ExperimentId::exp2, 5);
    const SimulatedData a = simulate(c);
    const SimulatedData b = simulate_with_family(c, a.family, 5);
    CHECK(a.data.x() == b.data.x());
    CHECK(a.data.y() == b.data.y());
}

TEST_CASE("experiment one shape") {
    const SimulatedData s = make_experiment(ExperimentId::exp1, 1);
    CHECK(s.data.rows() == 100);
    CHECK(s.data.dim() == 3);
    CHECK(s.data.block_count() == 10);
    CHECK((s.beta0.array() == 1.0).all());
    for (const auto& f : s.family.members()) {
        CHECK(f.mean == 0.0);
        CHECK(f.variance >= 0.0);
        CHECK(f.variance <= 3.0);
    }
    CHECK(s.data.blocks().block(1).front() == 10);
}

TEST_CASE("experiment three has five active coefficients out of forty") {
    for (auto id : {ExperimentId::exp3_indep, ExperimentId::exp3_corr, ExperimentId::exp4}) {
        const SimulatedData s = make_experiment(id, 2);
        CHECK(s.beta0.size() == 40);
        CHECK((s.beta0.array() != 0.0).count() == 5);
        CHECK(s.beta0.head(5).isOnes());
        CHECK(s.data.rows() == 2000);
    }
    CHECK(experiment_from_string("exp3") == ExperimentId::exp3_indep);
    CHECK_THROWS_AS(experiment_from_string("exp9"), DomainError);
}

TEST_CASE("experiment two and four mean ranges") {
    const SimulatedData e2 = make_experiment(ExperimentId::exp2, 4);
    const SimulatedData e4 = make_experiment(ExperimentId::exp4, 4);
    for (const auto& f : e2.family.members()) {
        CHECK(f.mean >= 3.0);
        CHECK(f.mean <= 5.0);
        CHECK(f.variance <= 4.0);
    }
    for (const auto& f : e4.family.members()) {
        CHECK(f.mean >= 5.0);
        CHECK(f.mean <= 10.0);
        CHECK(f.variance >= 1.0);
        CHECK(f.variance <= 4.0);
    }
}

TEST_CASE("equicorrelation matrix") {
    const MatrixXd s = equicorrelation(40, 0.5);
    CHECK(s.diagonal().isOnes());
    CHECK(s(0, 1) == 0.5);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s);
    CHECK(eig.eigenvalues().minCoeff() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(experiment_config(ExperimentId::exp3_corr, 0).covariate_second_moment() == s);
}

TEST_CASE("covariate laws and their moments") {
    const ExperimentConfig c = experiment_config(ExperimentId::exp1, 0);
    CHECK(c.covariate_mean().isApprox(VectorXd::Constant(3, 10.0)));
    const MatrixXd exx = c.covariate_second_moment();
    CHECK(exx(0, 0) == doctest::Approx(102.0));
    CHECK(exx(0, 1) == doctest::Approx(100.0));
    const MatrixXd x = sample_covariates(c, 3);
    CHECK(x.rows() == 100);
    CHECK(std::abs(x.mean() - 10.0) < 0.5);
}

TEST_CASE("block sample means converge to the drawn means") {
    ExperimentConfig c = experiment_config(ExperimentId::exp2, 9);
    c.n = 10000;
    const BlockErrors e = sample_block_errors(c);
    for (std::size_t i = 0; i < c.m; ++i) {
        const auto& f = e.truth[i];
        const double se = std::sqrt(f.variance / static_cast<double>(c.n));
        const double mean = e.errors.row(static_cast<Eigen::Index>(i)).mean();
        CHECK(std::abs(mean - f.mean) <= 5.0 * se + 1e-12);
        const Eigen::ArrayXd dev = e.errors.row(static_cast<Eigen::Index>(i)).array() - mean;
        const double var = dev.square().sum() / static_cast<double>(c.n - 1);
        CHECK(std::abs(var - f.variance) < 0.1 * std::max(f.variance, 0.5));
    }
}

TEST_CASE("realized family moments equal the drawn extremes") {
    const SimulatedData s = make_experiment(ExperimentId::exp2, 14);
    double mu_hi = -1e300, mu_lo = 1e300, s_hi = -1e300, s_lo = 1e300;
    for (const auto& f : s.family.members()) {
        mu_hi = std::max(mu_hi, f.mean);
        mu_lo = std::min(mu_lo, f.mean);
        s_hi = std::max(s_hi, f.variance + f.mean * f.mean);
        s_lo = std::min(s_lo, f.variance + f.mean * f.mean);
    }
    const auto m = sublinear_moments(s.family);
    CHECK(m.mu_upper == mu_hi);
    CHECK(m.mu_lower == mu_lo);
    CHECK(m.sigma2_upper == s_hi);
    CHECK(m.sigma2_lower == s_lo);
}

TEST_CASE("configuration validation") {
    ExperimentConfig c = experiment_config(ExperimentId::exp1, 0);
    c.mu_lower = 1.0;
    c.mu_upper = 0.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = experiment_config(ExperimentId::exp1, 0);
    c.var_lower = -1.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = experiment_config(ExperimentId::exp1, 0);
    c.m = 0;
    CHECK_THROWS_AS(sample_block_errors(c), DomainError);
    CHECK_THROWS_AS(simulate_with_family(experiment_config(ExperimentId::exp1, 0), DistributionFamily({{0, 1}}), 1),
                    DomainError);
}

}  // TEST_SUITE
