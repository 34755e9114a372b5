#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace binspec {

/// Cholesky factor of a symmetric matrix that should be positive definite.
/// On failure a ridge of 1e-10 * trace/n is added once and the factorization
/// retried; failing again throws NumericalError mentioning `what`.
Eigen::LLT<Eigen::MatrixXd> factorize_spd(const Eigen::MatrixXd& a, std::string_view what);

/// diag(A^{-1}) for a symmetric positive definite A, via a Cholesky solve.
/// Throws SingularFisherError when A is not numerically positive definite.
Eigen::VectorXd spd_inverse_diagonal(const Eigen::MatrixXd& a, std::string_view what);

/// A^{-1} b for a small symmetric positive definite A. Singular A (smallest
/// eigenvalue <= 1e-12 * largest) throws SingularFisherError.
Eigen::VectorXd spd_solve_checked(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                  std::string_view what);

}  // namespace binspec
