#include "flatmaj/dense.hpp"

#include <cmath>

#include "flatmaj/errors.hpp"

namespace flatmaj {

Matrix kron(const Matrix& x, const Matrix& y) {
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        }
    }
    return out;
}

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double hermitian_residual(const Matrix& m) { return (m - m.adjoint()).norm(); }

bool is_hermitian(const Matrix& m, double tol) {
    return m.rows() == m.cols() && hermitian_residual(m) <= tol;
}

double projection_residual(const Matrix& p) { return (p * p - p).norm(); }

Matrix support_basis(const Matrix& psd, double threshold) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(psd);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");
    const auto& vals = es.eigenvalues();
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) > threshold) ++count;
    }
    Matrix basis(psd.rows(), count);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) > threshold) basis.col(k++) = es.eigenvectors().col(i);
    }
    return basis;
}

Matrix psd_power(const Matrix& psd, double exponent, double eig_floor) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(psd);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");
    Eigen::VectorXd powered = Eigen::VectorXd::Zero(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < powered.size(); ++i) {
        const double v = es.eigenvalues()(i);
        if (v > eig_floor) powered(i) = std::pow(v, exponent);
    }
    return es.eigenvectors() * powered.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix psd_clip(const Matrix& herm) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");
    Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
}

double min_eigenvalue(const Matrix& herm) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");
    return es.eigenvalues().minCoeff();
}

double fidelity(const Matrix& a, const Matrix& b) {
    const Matrix root_a = psd_power(a, 0.5);
    const Matrix inner = hermitize(root_a * b * root_a);
    Eigen::SelfAdjointEigenSolver<Matrix> es(inner, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");
    double tr_root = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double v = es.eigenvalues()(i);
        if (v > 0.0) tr_root += std::sqrt(v);
    }
    return tr_root * tr_root;
}

Matrix partial_trace_first(const Matrix& m, Eigen::Index dim_first, Eigen::Index dim_second) {
    Matrix out = Matrix::Zero(dim_second, dim_second);
    for (Eigen::Index i = 0; i < dim_first; ++i) {
        out += m.block(i * dim_second, i * dim_second, dim_second, dim_second);
    }
    return out;
}

Matrix partial_trace_second(const Matrix& m, Eigen::Index dim_first, Eigen::Index dim_second) {
    Matrix out = Matrix::Zero(dim_first, dim_first);
    for (Eigen::Index i = 0; i < dim_first; ++i) {
        for (Eigen::Index j = 0; j < dim_first; ++j) {
            out(i, j) = m.block(i * dim_second, j * dim_second, dim_second, dim_second).trace();
        }
    }
    return out;
}

}  // namespace flatmaj
