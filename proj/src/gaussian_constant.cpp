#include "blflow/gaussian_constant.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <random>

#include "blflow/bellman_matrix.hpp"
#include "blflow/quadrature.hpp"

namespace blflow {

std::string to_string(SupStatus s) {
  switch (s) {
    case SupStatus::Converged: return "converged";
    case SupStatus::NotConverged: return "not-converged";
    case SupStatus::NotAttained: return "not-attained";
    case SupStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

void check_shapes(const VectorSystem& sys, const Exponents& e, const VectorXd& log_b) {
  if (e.size() != sys.n() || log_b.size() != sys.n()) {
    throw Error(ErrorKind::Structural, "gaussian objective: length mismatch");
  }
  e.require_sum(sys.k(), 1e-12);
}

}  // namespace

double gaussian_integral(const MatrixXd& Q) {
  Eigen::LLT<MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalAnomaly, "Q(b) is not positive definite");
  }
  const VectorXd d = MatrixXd(llt.matrixL()).diagonal();
  if (d.minCoeff() <= 0.0) throw Error(ErrorKind::NumericalAnomaly, "Q(b) is singular");
  return std::exp(-d.array().log().sum());
}

GaussianLogModel gaussian_log_objective(const VectorSystem& sys, const Exponents& e,
                                        const VectorXd& log_b) {
  check_shapes(sys, e, log_b);
  const int n = sys.n();
  const VectorXd w = e.inv_p().cwiseProduct(log_b.array().exp().matrix());  // b_j / p_j
  const MatrixXd Q = sys.A() * w.asDiagonal() * sys.A().transpose();
  Eigen::LLT<MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalAnomaly, "Q(b) is not positive definite");
  }
  const VectorXd L = MatrixXd(llt.matrixL()).diagonal();
  if (L.minCoeff() <= 0.0) throw Error(ErrorKind::NumericalAnomaly, "Q(b) is singular");

  GaussianLogModel m;
  m.log_value = 0.5 * e.inv_p().dot(log_b) - L.array().log().sum();
  // G = S A^T Q^-1 A S with S = diag(sqrt(w)); d log det Q / d log b_j = G_jj.
  const MatrixXd Y = llt.matrixL().solve(sys.A() * w.cwiseSqrt().asDiagonal());
  const MatrixXd G = Y.transpose() * Y;
  m.gradient = 0.5 * e.inv_p() - 0.5 * G.diagonal();
  m.hessian = -0.5 * (MatrixXd(G.diagonal().asDiagonal()) - G.cwiseProduct(G));
  (void)n;
  return m;
}

GaussianValue gaussian_objective(const VectorSystem& sys, const Exponents& e, const VectorXd& log_b) {
  const GaussianLogModel m = gaussian_log_objective(sys, e, log_b);
  GaussianValue v;
  v.value = std::exp(m.log_value);
  v.gradient = v.value * m.gradient;
  return v;
}

double gaussian_integrand(const VectorSystem& sys, const Exponents& e, const VectorXd& b,
                          const VectorXd& x) {
  double v = 1.0;
  for (int j = 0; j < sys.n(); ++j) {
    const double y = sys.A().col(j).dot(x);
    const double g = std::sqrt(b[j]) * std::exp(-std::numbers::pi * y * y * b[j]);
    v *= std::pow(g, e[j]);
  }
  return v;
}

double closed_form_self_test() {
  struct Case {
    MatrixXd A;
    VectorXd inv_p, b;
  };
  std::vector<Case> cases;
  {
    MatrixXd A(1, 2);
    A << 1.0, 1.0;
    cases.push_back({A, (VectorXd(2) << 0.5, 0.5).finished(), (VectorXd(2) << 1.0, 4.0).finished()});
  }
  {
    MatrixXd A(2, 3);
    A << 1.0, 1.0, 0.0, 0.0, -1.0, 1.0;
    cases.push_back({A, VectorXd::Constant(3, 2.0 / 3.0), (VectorXd(3) << 0.5, 2.0, 1.3).finished()});
  }
  {
    MatrixXd A(2, 4);
    A << 1.0, 0.3, -0.7, 0.2, 0.1, 1.0, 0.4, -1.1;
    cases.push_back({A, (VectorXd(4) << 0.6, 0.5, 0.5, 0.4).finished(),
                     (VectorXd(4) << 1.0, 0.7, 2.2, 0.9).finished()});
  }
  double worst = 0.0;
  for (const auto& c : cases) {
    const VectorSystem sys(c.A);
    const Exponents e(c.inv_p);
    const double closed = gaussian_objective(sys, e, c.b.array().log().matrix()).value;
    const MatrixXd Q = c.A * e.inv_p().cwiseProduct(c.b).asDiagonal() * c.A.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Q, Eigen::EigenvaluesOnly);
    const double L = std::sqrt(40.0 / (std::numbers::pi * es.eigenvalues().minCoeff()));
    CubeQuadOptions qo;
    qo.tol = 1e-12;
    qo.initial_panels = 8;
    qo.max_levels = 6;
    const auto q = integrate_cube(
        [&](const VectorXd& x) { return gaussian_integrand(sys, e, c.b, x); }, sys.k(), L, qo);
    worst = std::max(worst, std::abs(q.value - closed) / closed);
  }
  return worst;
}

void require_closed_form_self_test() {
  static std::once_flag once;
  static double worst = 0.0;
  std::call_once(once, [] { worst = closed_form_self_test(); });
  if (!(worst <= 1e-8)) {
    throw Error(ErrorKind::NumericalAnomaly, "closed-form Gaussian integral failed its quadrature self-test");
  }
}

namespace {

struct AscentOutcome {
  VectorXd log_b;
  double log_value = -INFINITY;
  double grad_norm = INFINITY;
  int iterations = 0;
  bool converged = false;
  bool drifted = false;
  bool failed = false;
};

void center(VectorXd& x) { x.array() -= x.mean(); }

// Newton-preconditioned ascent on log D restricted to sum log b = 0. The
// objective is concave in log b (log det of a positive sum of exponentials
// is convex by Cauchy-Binet), so any stationary point is the global max.
AscentOutcome ascend(const VectorSystem& sys, const Exponents& e, VectorXd x,
                     const MaximizeOptions& opts) {
  const int n = sys.n();
  const MatrixXd Pg = MatrixXd::Identity(n, n) - MatrixXd::Constant(n, n, 1.0 / n);
  AscentOutcome out;
  center(x);
  GaussianLogModel m;
  try {
    m = gaussian_log_objective(sys, e, x);
  } catch (const Error&) {
    out.failed = true;
    return out;
  }
  for (int it = 0; it < opts.max_iter; ++it) {
    const VectorXd g = Pg * m.gradient;
    out.grad_norm = g.norm();
    out.iterations = it;
    if (out.grad_norm <= opts.grad_tol) {
      out.converged = true;
      break;
    }
    if (x.cwiseAbs().maxCoeff() > opts.drift_limit) {
      out.drifted = true;
      break;
    }
    // Newton direction in the gauge complement; gradient step as fallback.
    MatrixXd H = Pg * m.hessian * Pg - MatrixXd::Constant(n, n, 1.0 / n);
    VectorXd d;
    Eigen::LDLT<MatrixXd> ldlt(-H);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      d = Pg * ldlt.solve(g);
      if (!(d.dot(g) > 0.0) || !d.allFinite()) d = g;
    } else {
      d = g;
    }
    if (d.cwiseAbs().maxCoeff() > 5.0) d *= 5.0 / d.cwiseAbs().maxCoeff();
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      VectorXd trial = x + step * d;
      center(trial);
      try {
        GaussianLogModel mt = gaussian_log_objective(sys, e, trial);
        // Near the maximum the Armijo gain drops below rounding; a full
        // Newton step that shrinks the gradient is taken instead.
        const bool armijo = mt.log_value >= m.log_value + 1e-4 * step * g.dot(d);
        const bool newton = step == 1.0 &&
                            mt.log_value >= m.log_value - 1e-14 * (1.0 + std::abs(m.log_value)) &&
                            (Pg * mt.gradient).norm() < 0.5 * out.grad_norm;
        if (armijo || newton) {
          x = std::move(trial);
          m = std::move(mt);
          accepted = true;
          break;
        }
      } catch (const Error&) {
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No ascent possible within floating-point resolution.
      out.converged = out.grad_norm <= 1e3 * opts.grad_tol;
      break;
    }
  }
  out.log_b = x;
  out.log_value = m.log_value;
  out.grad_norm = (Pg * m.gradient).norm();
  if (out.grad_norm <= opts.grad_tol) out.converged = true;
  return out;
}

// Smallest curvature of log D across the gauge complement, relative to the largest.
bool flat_maximum(const VectorSystem& sys, const Exponents& e, const VectorXd& log_b) {
  const int n = sys.n();
  const MatrixXd Pg = MatrixXd::Identity(n, n) - MatrixXd::Constant(n, n, 1.0 / n);
  const GaussianLogModel m = gaussian_log_objective(sys, e, log_b);
  const MatrixXd H = -(Pg * m.hessian * Pg);
  const VectorXd ev = Eigen::SelfAdjointEigenSolver<MatrixXd>(H + MatrixXd::Constant(n, n, 1.0 / n)).eigenvalues();
  return ev[0] < 1e-6 * std::max(1.0, ev[n - 1]);
}

}  // namespace

DResult maximize_D(const VectorSystem& sys, const Exponents& e, const MaximizeOptions& opts) {
  require_closed_form_self_test();
  e.require_sum(sys.k(), 1e-12);
  const int n = sys.n();
  DResult res;
  const FinitenessVerdict fin = is_finite(sys, e);
  res.membership = fin.verdict;
  if (fin.verdict != Membership::Inside) {
    res.warnings.push_back("exponents are " + to_string(fin.verdict) +
                           " of K: the supremum may be infinite or attained only in a limit");
  }

  std::vector<VectorXd> starts;
  starts.push_back(VectorXd::Zero(n));
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.5);
  for (int s = 1; s < opts.starts; ++s) {
    VectorXd x(n);
    for (int j = 0; j < n; ++j) x[j] = normal(rng);
    starts.push_back(x);
  }
  if (opts.seed_from_s_system && fin.verdict == Membership::Inside) {
    try {
      const SSystemResult ss = solve_s_system(sys, e);
      if (ss.converged) {
        // stationarity of log D in log b is the s-system with s_j^2 = b_j / p_j
        starts.push_back(ss.s_sq.cwiseQuotient(e.inv_p()).array().log().matrix());
      }
    } catch (const Error&) {
    }
  }

  AscentOutcome best;
  bool any_drift = false, any_ok = false;
  for (const auto& x0 : starts) {
    AscentOutcome out = ascend(sys, e, x0, opts);
    res.iterations += out.iterations;
    if (out.failed) continue;
    any_ok = true;
    any_drift = any_drift || out.drifted;
    if (out.converged && !out.drifted) {
      const VectorXd b = out.log_b.array().exp();
      const double v = std::exp(out.log_value);
      bool seen = false;
      for (const auto& lm : res.local_maxima) {
        if (std::abs(lm.value - v) <= 1e-9 * v && (lm.b - b).norm() <= 1e-6 * b.norm()) seen = true;
      }
      if (!seen) res.local_maxima.push_back({v, b});
    }
    const bool usable = out.converged && !out.drifted;
    const bool best_usable = best.converged && !best.drifted;
    if ((usable && !best_usable) || (usable == best_usable && out.log_value > best.log_value)) best = out;
  }
  res.restarts = static_cast<int>(starts.size());
  if (!any_ok) throw Error(ErrorKind::NumericalAnomaly, "objective could not be evaluated at any start");

  res.D = std::exp(best.log_value);
  res.argmax_b = best.log_b.array().exp();
  res.grad_norm = best.grad_norm;
  if (best.drifted || (any_drift && fin.verdict != Membership::Inside)) {
    res.status = fin.verdict == Membership::Outside ? SupStatus::Unbounded : SupStatus::NotAttained;
  } else if (best.converged && fin.verdict == Membership::Boundary && flat_maximum(sys, e, best.log_b)) {
    // on the boundary of K a vanishing gradient with vanishing curvature is
    // the signature of an ascent running off to infinity slowly
    res.status = SupStatus::NotAttained;
  } else if (best.converged) {
    res.status = SupStatus::Converged;
  } else {
    res.status = SupStatus::NotConverged;
  }
  return res;
}

}  // namespace blflow
