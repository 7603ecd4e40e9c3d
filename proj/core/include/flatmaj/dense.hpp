#pragma once

#include <Eigen/Dense>

namespace flatmaj {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Concrete complex-matrix realization of a flat pair on one Hilbert space.
struct DenseOperatorPair {
    Matrix a;
    Matrix b;

    Eigen::Index dim() const { return a.rows(); }
};

Matrix kron(const Matrix& x, const Matrix& y);

// (m + m^dagger) / 2.
Matrix hermitize(const Matrix& m);

double hermitian_residual(const Matrix& m);

bool is_hermitian(const Matrix& m, double tol = 1e-9);

// ||P^2 - P||_F, for Hermitian P.
double projection_residual(const Matrix& p);

// Orthonormal columns spanning the eigenspaces of a Hermitian PSD matrix with
// eigenvalue above the threshold.
Matrix support_basis(const Matrix& psd, double threshold = 1e-12);

// Fractional power on the support: eigenvalues at or below the floor are
// treated as exactly zero and excluded.
Matrix psd_power(const Matrix& psd, double exponent, double eig_floor = 1e-14);

// Nearest PSD matrix in Frobenius norm (eigenvalue clip at zero).
Matrix psd_clip(const Matrix& herm);

// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const Matrix& herm);

// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2 of two PSD matrices.
double fidelity(const Matrix& a, const Matrix& b);

// Partial traces on a bipartite space ordered as kron(first, second).
Matrix partial_trace_first(const Matrix& m, Eigen::Index dim_first, Eigen::Index dim_second);
Matrix partial_trace_second(const Matrix& m, Eigen::Index dim_first, Eigen::Index dim_second);

}  // namespace flatmaj
