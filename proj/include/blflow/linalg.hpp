#pragma once

#include <Eigen/Dense>

namespace blflow {

bool is_symmetric(const Eigen::MatrixXd& M, double tol);

/// Largest eigenvalue of a symmetric matrix.
double max_eigenvalue(const Eigen::MatrixXd& M);

/// True iff max eigenvalue of M is <= tol. Throws Structural if M is not
/// symmetric within tol.
bool psd_leq_zero(const Eigen::MatrixXd& M, double tol);

/// Number of singular values greater than tol * (largest singular value).
int numerical_rank(const Eigen::MatrixXd& M, double tol = 1e-9);

}  // namespace blflow
