#pragma once

#include <Eigen/Dense>

namespace blflow {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  double infeasibility = 0.0;  // phase-one optimum (sum of artificials)
};

/// maximize c^T x subject to A x = b, x >= 0. Dense two-phase simplex with
/// Bland's rule; intended for the small problems of the polytope module.
LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& c, double feas_tol = 1e-12);

}  // namespace blflow
