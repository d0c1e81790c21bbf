#pragma once

#include <Eigen/Dense>

namespace thermalab::detail {

// In-place Hermitian eigensolvers (ascending). The input matrix is consumed.
// LAPACKE-backed above a size threshold when available, Eigen otherwise.
void eigensolve_sym(Eigen::MatrixXd& a, Eigen::VectorXd& evals, Eigen::MatrixXd& evecs);
void eigensolve_herm(Eigen::MatrixXcd& a, Eigen::VectorXd& evals, Eigen::MatrixXcd& evecs);
Eigen::VectorXd eigenvalues_sym(Eigen::MatrixXd a);
Eigen::VectorXd eigenvalues_herm(Eigen::MatrixXcd a);

} // namespace thermalab::detail
