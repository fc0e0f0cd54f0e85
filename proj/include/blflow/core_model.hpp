#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blflow/error.hpp"

namespace blflow {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Numerical thresholds shared across modules. Every field can be
/// overridden from a problem file.
struct Tolerances {
  double rank_tol = 1e-9;       // relative singular-value cutoff
  double fd_tol = 1e-6;         // finite-difference consistency
  double homog_tol = 1e-8;      // Euler identity
  double basis_tol = 1e-9;      // |det| / prod |a_j| for a basis
  double boundary_tol = 1e-9;   // LP slack for inside/boundary
  double res_tol = 1e-10;       // s-system residual
  double findc_tol = 1e-9;      // A diag(1/(p sigma)) A^T C - I
  double projection_tol = 1e-8; // eigenvalues of P in {0, 1}
  double psd_tol = 1e-9;        // relative max-eigenvalue bound for L3
  double pde_tol = 1e-8;        // normalized PDE identity defect
  double quad_tol = 1e-10;      // relative change between quadrature refinements
  double damping = 0.5;
  int max_iter = 5000;
  int samples = 1000;
};

/// The k x n matrix whose columns a_1..a_n span R^k.
class VectorSystem {
 public:
  explicit VectorSystem(MatrixXd A, double rank_tol = 1e-9);

  int k() const { return static_cast<int>(A_.rows()); }
  int n() const { return static_cast<int>(A_.cols()); }
  const MatrixXd& A() const { return A_; }
  VectorXd column(int j) const { return A_.col(j); }

  /// Same system with columns reordered: result column j is column perm[j].
  VectorSystem permuted(const std::vector<int>& perm) const;

 private:
  MatrixXd A_;
};

/// The vector (1/p_1, ..., 1/p_n). Construction only checks finiteness so
/// that polytope queries can probe arbitrary points; operations that need
/// 0 < 1/p_j <= 1 or sum = k call the require_* helpers.
class Exponents {
 public:
  explicit Exponents(VectorXd inv_p);

  static Exponents from_p(const VectorXd& p);

  const VectorXd& inv_p() const { return inv_p_; }
  int size() const { return static_cast<int>(inv_p_.size()); }
  double operator[](int j) const { return inv_p_[j]; }
  double sum() const { return inv_p_.sum(); }

  bool sums_to(int k, double tol = 1e-12) const;
  void require_unit_interval() const;
  void require_sum(int k, double tol = 1e-12) const;

 private:
  VectorXd inv_p_;
};

/// Candidate matrix C with its diagnostics. sigma_j = <C a_j, a_j>.
struct GaussCert {
  MatrixXd C;
  VectorXd s_sq;
  VectorXd sigma;
  double residual = 0.0;
  std::vector<std::string> warnings;
};

/// Computes sigma_j = <C a_j, a_j> for every column.
VectorXd diffusivities(const VectorSystem& sys, const MatrixXd& C);

/// Wraps an explicitly supplied C. s_sq is left empty: it only exists for
/// certificates produced by the s-system solver.
GaussCert certificate_from_matrix(const VectorSystem& sys, const MatrixXd& C,
                                  double sym_tol = 1e-12);

}  // namespace blflow
