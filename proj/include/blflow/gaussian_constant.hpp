#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blflow/core_model.hpp"
#include "blflow/polytope.hpp"

namespace blflow {

struct GaussianValue {
  double value = 0.0;
  VectorXd gradient;  // d value / d log_b
};

/// prod_j b_j^(1/(2 p_j)) * det(Q(b))^(-1/2), Q(b) = sum_j (b_j / p_j) a_j a_j^T,
/// which equals the integral over R^k of prod_j g_j^(1/p_j)(<a_j, x>) with
/// g_j(y) = b_j^(1/2) exp(-pi b_j y^2). Needs sum 1/p_j = k; throws
/// NumericalAnomaly if Q(b) is not positive definite.
GaussianValue gaussian_objective(const VectorSystem& sys, const Exponents& e, const VectorXd& log_b);

/// log of gaussian_objective, its gradient and Hessian in log_b.
struct GaussianLogModel {
  double log_value = 0.0;
  VectorXd gradient;
  MatrixXd hessian;
};
GaussianLogModel gaussian_log_objective(const VectorSystem& sys, const Exponents& e,
                                        const VectorXd& log_b);

/// The integrand prod_j g_j(<a_j, x>)^(1/p_j), evaluated directly.
double gaussian_integrand(const VectorSystem& sys, const Exponents& e, const VectorXd& b,
                          const VectorXd& x);

/// Integral of exp(-pi x^T Q x) over R^k, i.e. det(Q)^(-1/2).
double gaussian_integral(const MatrixXd& Q);

/// Compares the closed form against tensor quadrature of the integrand on a
/// fixed set of k <= 2 instances. Returns the worst relative error.
double closed_form_self_test();

/// Runs closed_form_self_test once per process and throws NumericalAnomaly
/// if it does not agree to 1e-8.
void require_closed_form_self_test();

enum class SupStatus { Converged, NotConverged, NotAttained, Unbounded };
std::string to_string(SupStatus s);

struct MaximizeOptions {
  int starts = 8;
  std::uint64_t seed = 0;
  double grad_tol = 1e-10;
  int max_iter = 10000;
  bool seed_from_s_system = true;
  double drift_limit = 40.0;  // max |log b_j| before the sup is declared unattained
};

struct LocalMaximum {
  double value = 0.0;
  VectorXd b;
};

struct DResult {
  double D = 0.0;
  VectorXd argmax_b;  // gauge: sum log b_j = 0
  double grad_norm = 0.0;
  int restarts = 0;
  int iterations = 0;
  SupStatus status = SupStatus::NotConverged;
  Membership membership = Membership::Outside;
  std::vector<LocalMaximum> local_maxima;
  std::vector<std::string> warnings;
};

/// Supremum of the Gaussian functional over b > 0. Ascent in gauge-fixed log
/// coordinates with backtracking; multi-start plus one start seeded by the
/// s-system solution when it converges.
DResult maximize_D(const VectorSystem& sys, const Exponents& e, const MaximizeOptions& opts = {});

}  // namespace blflow
