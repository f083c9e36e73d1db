#include "sublinear/metrics.hpp"

#include "sublinear/errors.hpp"
#include "sublinear/estimators.hpp"
#include "sublinear/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace sublinear {

double mpe(const Dataset& data, const VectorXd& beta, double shift) {
    data.blocks().balanced_size();
    return block_mse(data, beta, shift).maxCoeff();
}

double ape(const Dataset& data, const VectorXd& beta, double shift) {
    data.blocks().balanced_size();
    return block_mse(data, beta, shift).mean();
}

VectorXd coefficient_mse(const MatrixXd& estimates, const VectorXd& beta0) {
    if (estimates.rows() < 1) throw DomainError("coefficient_mse needs at least one replication");
    if (estimates.cols() != beta0.size()) throw DomainError("estimates and beta0 differ in dimension");
    const MatrixXd dev = estimates.rowwise() - beta0.transpose();
    return dev.array().square().colwise().mean().transpose();
}

double ordered_sum(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

NormalityDiagnostics normality_check(const MatrixXd& estimates, const VectorXd& beta0, double n,
                                     double target_sigma2, const MatrixXd& target_exx) {
    if (estimates.rows() < 100) throw DomainError("normality check needs at least 100 replications");
    if (estimates.cols() != beta0.size() || target_exx.rows() != beta0.size())
        throw DomainError("dimension mismatch");
    if (!(n > 0.0)) throw DomainError("n must be positive");
    NormalityDiagnostics out;
    const auto r = estimates.rows();
    out.replications = static_cast<std::size_t>(r);
    const MatrixXd z = (estimates.rowwise() - beta0.transpose()) * std::sqrt(n);
    const VectorXd mean = z.colwise().mean().transpose();
    const MatrixXd centered = z.rowwise() - mean.transpose();
    out.empirical = centered.transpose() * centered / static_cast<double>(r - 1);
    const linalg::SpdFactor factor(target_exx, "covariate second-moment matrix not invertible");
    out.target = target_sigma2 * factor.inverse();
    out.relative_frobenius = (out.empirical - out.target).norm() / out.target.norm();

    const auto p = z.cols();
    out.skewness.resize(p);
    out.excess_kurtosis.resize(p);
    for (Eigen::Index k = 0; k < p; ++k) {
        const Eigen::ArrayXd d = centered.col(k).array();
        const double m2 = d.square().mean();
        const double m3 = d.cube().mean();
        const double m4 = d.square().square().mean();
        out.skewness(k) = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
        out.excess_kurtosis(k) = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
    }
    return out;
}

}  // namespace sublinear
