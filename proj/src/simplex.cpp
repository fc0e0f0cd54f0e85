#include "blflow/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace blflow {

namespace {

constexpr double kPivotTol = 1e-11;

// Tableau rows 0..m-1 are constraints, last column is the rhs.
struct Tableau {
  Eigen::MatrixXd T;
  std::vector<int> basis;

  int rows() const { return static_cast<int>(T.rows()); }
  int rhs() const { return static_cast<int>(T.cols()) - 1; }

  void pivot(int r, int c) {
    T.row(r) /= T(r, c);
    for (int i = 0; i < rows(); ++i) {
      if (i != r && T(i, c) != 0.0) T.row(i) -= T(i, c) * T.row(r);
    }
    basis[r] = c;
  }

  // Maximizes cost over the first `active` columns. Returns false if unbounded.
  bool optimize(const Eigen::VectorXd& cost, int active) {
    for (int iter = 0; iter < 50000; ++iter) {
      // reduced costs d_j = c_j - c_B^T B^-1 A_j
      int enter = -1;
      for (int j = 0; j < active; ++j) {
        double d = cost[j];
        for (int i = 0; i < rows(); ++i) d -= cost[basis[i]] * T(i, j);
        if (d > 1e-12) {
          enter = j;  // Bland: smallest index
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows(); ++i) {
        if (T(i, enter) > kPivotTol) {
          const double ratio = T(i, rhs()) / T(i, enter);
          if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    return true;
  }
};

}  // namespace

LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& c, double feas_tol) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  Tableau tab;
  tab.T = Eigen::MatrixXd::Zero(m, n + m + 1);
  tab.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    tab.T.row(i).head(n) = sign * A.row(i);
    tab.T(i, n + i) = 1.0;
    tab.T(i, n + m) = sign * b[i];
    tab.basis[i] = n + i;
  }

  // Phase one: maximize -(sum of artificials).
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
  phase1.tail(m).setConstant(-1.0);
  tab.optimize(phase1, n + m);

  LpResult res;
  double infeas = 0.0;
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] >= n) infeas += tab.T(i, n + m);
  }
  res.infeasibility = infeas;
  if (infeas > feas_tol) {
    res.status = LpStatus::Infeasible;
    return res;
  }

  // Drive remaining (zero-level) artificials out; drop redundant rows.
  std::vector<int> keep;
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] >= n) {
      int col = -1;
      for (int j = 0; j < n; ++j) {
        if (std::abs(tab.T(i, j)) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        tab.pivot(i, col);
        keep.push_back(i);
      }
    } else {
      keep.push_back(i);
    }
  }
  Tableau t2;
  t2.T.resize(static_cast<int>(keep.size()), n + 1);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    t2.T.row(static_cast<int>(r)).head(n) = tab.T.row(keep[r]).head(n);
    t2.T(static_cast<int>(r), n) = tab.T(keep[r], n + m);
    t2.basis.push_back(tab.basis[keep[r]]);
  }

  if (!t2.optimize(c, n)) {
    res.status = LpStatus::Unbounded;
    return res;
  }
  res.status = LpStatus::Optimal;
  res.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < t2.rows(); ++i) res.x[t2.basis[i]] = std::max(0.0, t2.T(i, n));
  res.objective = c.dot(res.x);
  return res;
}

}  // namespace blflow
