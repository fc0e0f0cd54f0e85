#include "blflow/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "blflow/error.hpp"

namespace blflow {

bool is_symmetric(const Eigen::MatrixXd& M, double tol) {
  if (M.rows() != M.cols()) return false;
  return (M - M.transpose()).cwiseAbs().maxCoeff() <= tol;
}

double max_eigenvalue(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

bool psd_leq_zero(const Eigen::MatrixXd& M, double tol) {
  if (M.rows() != M.cols() || !is_symmetric(M, tol)) {
    throw Error(ErrorKind::Structural, "psd_leq_zero: matrix is not symmetric");
  }
  return max_eigenvalue(0.5 * (M + M.transpose())) <= tol;
}

int numerical_rank(const Eigen::MatrixXd& M, double tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  const double top = s.size() ? s[0] : 0.0;
  if (!(top > 0.0)) return 0;
  return static_cast<int>(std::count_if(s.begin(), s.end(),
                                        [&](double v) { return v > tol * top; }));
}

}  // namespace blflow
