#include "blflow/core_model.hpp"

#include <cmath>
#include <sstream>

#include "blflow/linalg.hpp"

namespace blflow {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Structural: return "structural";
    case ErrorKind::Input: return "input";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::CertificateRejected: return "certificate-rejected";
    case ErrorKind::UnsupportedScale: return "unsupported-scale";
    case ErrorKind::NumericalAnomaly: return "numerical-anomaly";
  }
  return "unknown";
}

VectorSystem::VectorSystem(MatrixXd A, double rank_tol) : A_(std::move(A)) {
  if (A_.rows() < 1 || A_.cols() < A_.rows()) {
    throw Error(ErrorKind::Structural, "vector system needs 1 <= k <= n");
  }
  if (!A_.allFinite()) {
    throw Error(ErrorKind::Structural, "vector system has non-finite entries");
  }
  for (int j = 0; j < A_.cols(); ++j) {
    if (A_.col(j).squaredNorm() == 0.0) {
      std::ostringstream msg;
      msg << "column a_" << j + 1 << " is zero";
      throw Error(ErrorKind::Structural, msg.str());
    }
  }
  if (numerical_rank(A_, rank_tol) < A_.rows()) {
    throw Error(ErrorKind::Structural, "rank(A) < k");
  }
}

VectorSystem VectorSystem::permuted(const std::vector<int>& perm) const {
  MatrixXd B(A_.rows(), A_.cols());
  for (int j = 0; j < n(); ++j) B.col(j) = A_.col(perm.at(j));
  return VectorSystem(std::move(B));
}

Exponents::Exponents(VectorXd inv_p) : inv_p_(std::move(inv_p)) {
  if (!inv_p_.allFinite()) {
    throw Error(ErrorKind::Domain, "exponents must be finite");
  }
}

Exponents Exponents::from_p(const VectorXd& p) {
  return Exponents(p.cwiseInverse());
}

bool Exponents::sums_to(int k, double tol) const {
  return std::abs(sum() - k) <= tol;
}

void Exponents::require_unit_interval() const {
  for (int j = 0; j < size(); ++j) {
    if (!(inv_p_[j] > 0.0 && inv_p_[j] <= 1.0)) {
      throw Error(ErrorKind::Domain, "1/p_j must lie in (0, 1]");
    }
  }
}

void Exponents::require_sum(int k, double tol) const {
  if (!sums_to(k, tol)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "sum of 1/p_j is " << sum() << ", expected k = " << k;
    throw Error(ErrorKind::Domain, msg.str());
  }
}

VectorXd diffusivities(const VectorSystem& sys, const MatrixXd& C) {
  return (sys.A().transpose() * C * sys.A()).diagonal();
}

GaussCert certificate_from_matrix(const VectorSystem& sys, const MatrixXd& C,
                                  double sym_tol) {
  if (C.rows() != sys.k() || C.cols() != sys.k()) {
    throw Error(ErrorKind::Structural, "C must be k x k");
  }
  if (!is_symmetric(C, sym_tol)) {
    throw Error(ErrorKind::Structural, "C is not symmetric");
  }
  GaussCert cert;
  cert.C = 0.5 * (C + C.transpose());
  cert.sigma = diffusivities(sys, cert.C);
  return cert;
}

}  // namespace blflow
