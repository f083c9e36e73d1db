#include "sublinear/linalg.hpp"

#include "sublinear/errors.hpp"

namespace sublinear::linalg {

namespace {

bool pivots_ok(const Eigen::LDLT<Eigen::MatrixXd>& ldlt) {
    if (ldlt.info() != Eigen::Success) return false;
    const Eigen::VectorXd d = ldlt.vectorD();
    if (d.size() == 0) return false;
    const double largest = d.maxCoeff();
    const double smallest = d.minCoeff();
    if (!(largest > 0.0) || !(smallest > 0.0)) return false;
    return smallest >= kPivotRatio * largest;
}

}  // namespace

SpdFactor::SpdFactor(const Eigen::MatrixXd& a, const std::string& message) {
    if (a.rows() != a.cols() || a.rows() == 0) throw SingularMatrixError(message);
    if (!a.allFinite()) throw SingularMatrixError(message);
    ldlt_.compute(a);
    if (!pivots_ok(ldlt_)) throw SingularMatrixError(message);
}

Eigen::VectorXd SpdFactor::solve(const Eigen::VectorXd& rhs) const { return ldlt_.solve(rhs); }

Eigen::MatrixXd SpdFactor::solve(const Eigen::MatrixXd& rhs) const { return ldlt_.solve(rhs); }

Eigen::MatrixXd SpdFactor::inverse() const {
    return ldlt_.solve(Eigen::MatrixXd::Identity(ldlt_.rows(), ldlt_.cols()));
}

bool is_positive_definite(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols() || a.rows() == 0 || !a.allFinite()) return false;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    return pivots_ok(ldlt);
}

}  // namespace sublinear::linalg
