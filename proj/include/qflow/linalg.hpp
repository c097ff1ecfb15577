// Dense linear-algebra kernels tuned for the flow integrator: Hermitian
// eigensolves (LAPACK divide-and-conquer), spectral norms, singular values,
// and matrix exponentials of small-norm normal matrices.

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qflow {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Eigendecomposition of a symmetric/Hermitian matrix: ascending eigenvalues,
// orthonormal eigenvector columns. Dispatches to LAPACK dsyevd/zheevd.
void eigh(const MatrixXd& H, VectorXd& eigenvalues, MatrixXd& eigenvectors);
void eigh(const MatrixXcd& H, VectorXd& eigenvalues, MatrixXcd& eigenvectors);

// Largest singular value (spectral norm), computed as the square root of the
// top eigenvalue of M^H M. Deterministic and exact to solver precision.
double operator_norm(const MatrixXd& M);
double operator_norm(const MatrixXcd& M);

// All singular values, descending.
VectorXd singular_values(const MatrixXd& M);
VectorXd singular_values(const MatrixXcd& M);

// exp(X) for a normal matrix of modest norm. Uses a fixed-degree
// Paterson-Stockmeyer Taylor evaluation when the norm permits (truncation
// error below 1e-13 for spectral norm <= 0.6), else Eigen's scaled Pade.
MatrixXd expm_normal(const MatrixXd& X);
MatrixXcd expm_normal(const MatrixXcd& X);

}  // namespace qflow
