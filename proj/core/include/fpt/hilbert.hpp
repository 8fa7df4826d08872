#pragma once

// Finite-basis model of a separable Hilbert space. Every element is stored as
// its coordinates in a fixed orthonormal basis, so inner products are plain
// Euclidean dot products and Hilbert-Schmidt norms are Frobenius norms.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace fpt {

using Complex = std::complex<double>;

using CoefVector = Eigen::VectorXd;
using ComplexCoefVector = Eigen::VectorXcd;
using OperatorMatrix = Eigen::MatrixXd;
using ComplexOperatorMatrix = Eigen::MatrixXcd;

/// Descending eigenvalues with orthonormal eigenvectors stored column-wise.
/// Eigenvector signs are normalised so the first nonzero coordinate is positive.
struct EigenSystem {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
    double trace() const { return values.sum(); }
};

/// <u, v> = <u0,v0> + <u1,v1> + i(<u1,v0> - <u0,v1>), linear in u.
Complex complex_inner(const ComplexCoefVector& u, const ComplexCoefVector& v);

/// Rank-one operator (x ⊗ y)(z) = <z, y> x, i.e. the matrix x y^H.
ComplexOperatorMatrix tensor(const ComplexCoefVector& x, const ComplexCoefVector& y);

double hs_norm(const ComplexOperatorMatrix& a);
double hs_norm(const OperatorMatrix& a);

/// Largest singular value.
double operator_norm(const OperatorMatrix& a);

/// Symmetric eigendecomposition for covariance-type (PSD) operators.
/// Eigenvalues within 1e-12 of zero are clipped to zero; a negative eigenvalue
/// below -1e-8 * max(1, lambda_max) throws NumericalError. Throws
/// std::invalid_argument when the input is not square or not symmetric.
EigenSystem sym_eigen(const OperatorMatrix& s);

/// Symmetric inverse square root. Throws NumericalError if any eigenvalue is
/// <= eps.
OperatorMatrix inv_sqrt(const OperatorMatrix& s, double eps = 1e-12);

bool is_symmetric(const OperatorMatrix& s, double tol = 1e-10);

} // namespace fpt
