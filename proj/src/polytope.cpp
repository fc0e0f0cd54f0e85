#include "blflow/polytope.hpp"

#include <cmath>

#include "blflow/simplex.hpp"

namespace blflow {

std::string to_string(Membership m) {
  switch (m) {
    case Membership::Inside: return "inside";
    case Membership::Boundary: return "boundary";
    case Membership::Outside: return "outside";
  }
  return "unknown";
}

namespace {

// Advances idx to the next k-combination of {0..n-1}; false when exhausted.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

BasisIndicatorSet enumerate_bases(const VectorSystem& sys, double basis_tol) {
  const int k = sys.k(), n = sys.n();
  BasisIndicatorSet out;
  out.n = n;
  out.k = k;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  do {
    Eigen::MatrixXd sub(k, k);
    double norms = 1.0;
    for (int i = 0; i < k; ++i) {
      sub.col(i) = sys.A().col(idx[i]);
      norms *= sub.col(i).norm();
    }
    if (std::abs(sub.determinant()) > basis_tol * norms) out.subsets.push_back(idx);
  } while (next_combination(idx, n));

  if (out.subsets.empty()) throw Error(ErrorKind::Structural, "rank(A) < k");
  out.vectors = Eigen::MatrixXd::Zero(n, out.size());
  for (int v = 0; v < out.size(); ++v) {
    for (int j : out.subsets[v]) out.vectors(j, v) = 1.0;
  }
  return out;
}

FinitenessVerdict is_finite(const BasisIndicatorSet& bases, const Exponents& e,
                            double boundary_tol) {
  const int n = bases.n, m = bases.size();
  if (e.size() != n) throw Error(ErrorKind::Structural, "exponent vector has wrong length");
  FinitenessVerdict out;
  out.basis_count = m;

  // Variables (mu_1..mu_m, t) >= 0 with lambda_v = mu_v + t:
  //   sum_v lambda_v v = e,  sum_v lambda_v = 1,  maximize t.
  const Eigen::VectorXd vsum = bases.vectors.rowwise().sum();
  Eigen::MatrixXd Aeq(n + 1, m + 1);
  Aeq.topLeftCorner(n, m) = bases.vectors;
  Aeq.col(m).head(n) = vsum;
  Aeq.row(n).head(m).setOnes();
  Aeq(n, m) = m;
  Eigen::VectorXd beq(n + 1);
  beq.head(n) = e.inv_p();
  beq[n] = 1.0;
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(m + 1);
  cost[m] = 1.0;

  const LpResult lp = solve_lp(Aeq, beq, cost, boundary_tol);
  if (lp.status != LpStatus::Optimal) {
    out.verdict = Membership::Outside;
    return out;
  }
  const double t = lp.x[m];
  out.weights = lp.x.head(m).array() + t;
  out.weights /= out.weights.sum();
  out.slack = t;
  // A member reached only through phase-one tolerance is ambiguous.
  const bool ambiguous = lp.infeasibility > 1e-13;
  out.verdict = (t > boundary_tol && !ambiguous) ? Membership::Inside : Membership::Boundary;
  return out;
}

FinitenessVerdict is_finite(const VectorSystem& sys, const Exponents& e,
                            double boundary_tol, double basis_tol) {
  return is_finite(enumerate_bases(sys, basis_tol), e, boundary_tol);
}

}  // namespace blflow
