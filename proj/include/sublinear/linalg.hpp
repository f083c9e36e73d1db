#pragma once

#include <Eigen/Dense>
#include <string>

namespace sublinear::linalg {

/// Pivot ratio below which a symmetric matrix is treated as singular.
inline constexpr double kPivotRatio = 1e-12;

/// Pivoted LDL' factorization of a symmetric positive definite matrix.
///
/// Construction throws SingularMatrixError(message) when a pivot is non-positive
/// or the smallest pivot falls below kPivotRatio times the largest, so singular
/// inputs fail the same way on every platform.
class SpdFactor {
public:
    explicit SpdFactor(const Eigen::MatrixXd& a,
                       const std::string& message = "matrix not positive definite");

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
    Eigen::MatrixXd inverse() const;
    Eigen::Index size() const { return ldlt_.rows(); }

private:
    Eigen::LDLT<Eigen::MatrixXd> ldlt_;
};

/// True when `a` passes the SpdFactor pivot test.
bool is_positive_definite(const Eigen::MatrixXd& a);

}  // namespace sublinear::linalg
