#pragma once

#include <Eigen/Dense>

#include "blflow/core_model.hpp"

namespace blflow {

struct SSystemOptions {
  double damping = 0.5;
  int max_iter = 5000;
  double res_tol = 1e-10;
};

struct SSystemResult {
  VectorXd s_sq;          // normalized to sum 1
  double residual = 0.0;  // max_j |1/p_j - s_j^2 <M^-1 a_j, a_j>|
  int iterations = 0;
  bool converged = false;
};

/// M(s) = A diag(s^2) A^T.
MatrixXd weighted_gram(const VectorSystem& sys, const VectorXd& s_sq);

/// max_j |1/p_j - s_j^2 <M(s)^-1 a_j, a_j>|. Throws NumericalAnomaly if M(s)
/// is numerically singular.
double s_system_residual(const VectorSystem& sys, const Exponents& e, const VectorXd& s_sq);

/// Damped fixed-point iteration s_j^2 <- (1/p_j) / <M(s)^-1 a_j, a_j>,
/// renormalized to sum s_j^2 = 1 each step. Non-convergence is reported in
/// the result, never retried with different parameters.
SSystemResult solve_s_system(const VectorSystem& sys, const Exponents& e,
                             const SSystemOptions& opts = {});

/// C = M(s)^-1, sigma_j = <C a_j, a_j>. Throws CertificateRejected when some
/// sigma_j <= 0.
GaussCert build_C(const VectorSystem& sys, const Exponents& e, const VectorXd& s_sq);

/// Frobenius norm of A diag(1/(p_j sigma_j)) A^T C - I.
double verify_findC(const VectorSystem& sys, const Exponents& e, const GaussCert& cert);

struct ProjectionReport {
  MatrixXd P;
  VectorXd eigenvalues;       // ascending
  double idempotency = 0.0;   // ||P^2 - P||_F
  double asymmetry = 0.0;     // max |P - P^T|
  double eig_distance = 0.0;  // max distance of an eigenvalue to {0, 1}
  int rank = 0;
  double trace = 0.0;
  double diag_bound_max_eig = 0.0;  // max eig of A^T C A - diag(1/s^2)
  bool pass = false;
};

/// P = (AS)^T C (AS) with S = diag(s_j); checks P^2 = P, symmetry, spectrum
/// in {0, 1}, rank k and the equivalent bound A^T C A <= diag(1/s_j^2).
ProjectionReport projection_check(const VectorSystem& sys, const GaussCert& cert,
                                  double tol = 1e-8);

/// Runs the polytope test, the solver and build_C; attaches a warning when
/// the exponents sit within 1e-6 (LP slack) of the boundary of K.
struct CertificateRun {
  SSystemResult solve;
  GaussCert cert;
  double findC_defect = 0.0;
  ProjectionReport projection;
  bool built = false;
};

CertificateRun solve_certificate(const VectorSystem& sys, const Exponents& e,
                                 const Tolerances& tol = {});

}  // namespace blflow
