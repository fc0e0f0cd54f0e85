#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Composite trapezoid on [a, b] with N intervals.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int N) {
  const double h = (b - a) / N;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < N; ++i) s += f(a + i * h);
  return s * h;
}

inline double trapezoid2(const std::function<double(double, double)>& f, double L, int N) {
  const double h = 2.0 * L / N;
  double s = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double wx = (i == 0 || i == N) ? 0.5 : 1.0;
    for (int j = 0; j <= N; ++j) {
      const double wy = (j == 0 || j == N) ? 0.5 : 1.0;
      s += wx * wy * f(-L + i * h, -L + j * h);
    }
  }
  return s * h * h;
}

// Integral over R^k (k <= 2) of prod_j g_j(<a_j, x>)^(1/p_j), g_j(y) = b_j^(1/2) exp(-pi b_j y^2).
inline double gaussian_functional_by_quadrature(const MatrixXd& A, const VectorXd& inv_p,
                                                const VectorXd& b, double L = 12.0, int N = 1200) {
  auto integrand = [&](const VectorXd& x) {
    double v = 1.0;
    for (int j = 0; j < A.cols(); ++j) {
      const double y = A.col(j).dot(x);
      v *= std::pow(std::sqrt(b[j]) * std::exp(-M_PI * b[j] * y * y), inv_p[j]);
    }
    return v;
  };
  if (A.rows() == 1) {
    return trapezoid([&](double t) { return integrand(VectorXd::Constant(1, t)); }, -L, L, N);
  }
  return trapezoid2([&](double s, double t) { return integrand((VectorXd(2) << s, t).finished()); }, L, N);
}

// prod b_j^(inv_p_j / 2) / sqrt(det sum_j inv_p_j b_j a_j a_j^T), written out
// independently of the library.
inline double gaussian_functional_closed(const MatrixXd& A, const VectorXd& inv_p, const VectorXd& b) {
  MatrixXd Q = MatrixXd::Zero(A.rows(), A.rows());
  double pre = 1.0;
  for (int j = 0; j < A.cols(); ++j) {
    Q += inv_p[j] * b[j] * A.col(j) * A.col(j).transpose();
    pre *= std::pow(b[j], 0.5 * inv_p[j]);
  }
  return pre / std::sqrt(Q.determinant());
}

// Grid search over log b in [log lo, log hi]^(n-1) with b_n = 1, then
// Hooke-Jeeves pattern search from the best grid point.
inline double brute_force_D(const MatrixXd& A, const VectorXd& inv_p, int grid = 41,
                            double lo = 1e-2, double hi = 1e2) {
  const int n = static_cast<int>(A.cols());
  const int m = n - 1;
  auto f = [&](const VectorXd& u) {
    VectorXd b(n);
    for (int i = 0; i < m; ++i) b[i] = std::exp(u[i]);
    b[m] = 1.0;
    return gaussian_functional_closed(A, inv_p, b);
  };
  const double a = std::log(lo), c = std::log(hi);
  VectorXd best(m), u(m);
  double fbest = -1.0;
  std::vector<int> idx(m, 0);
  while (true) {
    for (int i = 0; i < m; ++i) u[i] = a + (c - a) * idx[i] / (grid - 1);
    const double v = f(u);
    if (v > fbest) {
      fbest = v;
      best = u;
    }
    int d = 0;
    while (d < m && ++idx[d] == grid) idx[d++] = 0;
    if (d == m) break;
  }
  double step = (c - a) / (grid - 1);
  while (step > 1e-9) {
    bool improved = false;
    for (int i = 0; i < m; ++i) {
      for (double sgn : {1.0, -1.0}) {
        VectorXd t = best;
        t[i] += sgn * step;
        const double v = f(t);
        if (v > fbest) {
          fbest = v;
          best = t;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return fbest;
}

inline VectorXd fd_gradient(const std::function<double(const VectorXd&)>& f, const VectorXd& y,
                            double h) {
  VectorXd g(y.size());
  for (int i = 0; i < y.size(); ++i) {
    VectorXd p = y, m = y;
    p[i] += h;
    m[i] -= h;
    g[i] = (f(p) - f(m)) / (2.0 * h);
  }
  return g;
}

inline MatrixXd fd_jacobian(const std::function<VectorXd(const VectorXd&)>& g, const VectorXd& y,
                            double h) {
  const int n = static_cast<int>(y.size());
  MatrixXd J(n, n);
  for (int i = 0; i < n; ++i) {
    VectorXd p = y, m = y;
    p[i] += h;
    m[i] -= h;
    J.col(i) = (g(p) - g(m)) / (2.0 * h);
  }
  return J;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace oracle
