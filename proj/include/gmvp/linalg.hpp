#pragma once

#include <Eigen/Core>

namespace gmvp::linalg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// S = X'X (full symmetric matrix) via the active syrk kernel; X column-major.
MatrixXd gram(const MatrixXd& x);

// In-place Cholesky A = U'U, U stored in the upper triangle (column-major).
// Returns false when a pivot drops below a positive-definiteness floor;
// A is then left partially overwritten.
bool cholesky_upper_inplace(MatrixXd& a);

// Solve U'y = b (forward substitution against the stored upper factor).
VectorXd solve_transposed_upper(const MatrixXd& u, const VectorXd& b);

// Solve Ux = y (back substitution).
VectorXd solve_upper(const MatrixXd& u, const VectorXd& y);

// v'Sv for symmetric S.
double quad_form(const MatrixXd& s, const VectorXd& v);

// b'A^{-1}b given the Cholesky factor U of A (= squared norm of U'^{-1}b).
double inv_quad_form(const MatrixXd& u, const VectorXd& b);

// Symmetric eigendecomposition with eigenvalues sorted nonincreasing.
struct SymEigen {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // columns match values
};
SymEigen eigen_sym_descending(const MatrixXd& m);

// Eigendecomposition of Xc'Xc/(n-1) for column-centered Xc, computed on the
// smaller side of the (n x p) data panel. Returns min(n, p) pairs, values
// descending, vectors of length p.
SymEigen sample_covariance_eigen(const MatrixXd& xc);

// Center columns to mean zero.
MatrixXd center_columns(const MatrixXd& x);

// Extend a p x m matrix with orthonormal columns to a full p x p orthonormal
// basis; the first m columns are returned unchanged.
MatrixXd complete_orthonormal_basis(const MatrixXd& v);

}  // namespace gmvp::linalg
