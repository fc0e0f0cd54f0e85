#include "blflow/bellman_matrix.hpp"

#include <cmath>
#include <sstream>

#include "blflow/linalg.hpp"
#include "blflow/polytope.hpp"

namespace blflow {

namespace {

// <M^-1 a_j, a_j> for every column, via a Cholesky factorization of M.
VectorXd inverse_quadratic_forms(const VectorSystem& sys, const VectorXd& s_sq) {
  const MatrixXd M = weighted_gram(sys, s_sq);
  Eigen::LLT<MatrixXd> llt(M);
  const double scale = M.diagonal().maxCoeff();
  if (llt.info() != Eigen::Success || !(scale > 0.0) ||
      llt.matrixL().toDenseMatrix().diagonal().minCoeff() <= 1e-12 * std::sqrt(scale)) {
    throw Error(ErrorKind::NumericalAnomaly, "M(s) = A diag(s^2) A^T is numerically singular");
  }
  const MatrixXd Y = llt.matrixL().solve(sys.A());
  return Y.colwise().squaredNorm().transpose();
}

}  // namespace

MatrixXd weighted_gram(const VectorSystem& sys, const VectorXd& s_sq) {
  return sys.A() * s_sq.asDiagonal() * sys.A().transpose();
}

double s_system_residual(const VectorSystem& sys, const Exponents& e, const VectorXd& s_sq) {
  const VectorXd q = inverse_quadratic_forms(sys, s_sq);
  return (e.inv_p() - s_sq.cwiseProduct(q)).cwiseAbs().maxCoeff();
}

SSystemResult solve_s_system(const VectorSystem& sys, const Exponents& e,
                             const SSystemOptions& opts) {
  if (e.size() != sys.n()) throw Error(ErrorKind::Structural, "exponent vector has wrong length");
  e.require_unit_interval();
  const int n = sys.n();
  SSystemResult res;
  res.s_sq = VectorXd::Constant(n, 1.0 / n);
  // Once below res_tol the iteration continues towards res_tol / 1000 so that
  // the derived identities for C hold with margin; it stops early on stagnation.
  const double polish_tol = 1e-3 * opts.res_tol;
  VectorXd best;
  double best_residual = INFINITY;
  int stalled = 0;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const VectorXd q = inverse_quadratic_forms(sys, res.s_sq);
    const double r = (e.inv_p() - res.s_sq.cwiseProduct(q)).cwiseAbs().maxCoeff();
    res.iterations = it;
    if (r < best_residual) {
      best_residual = r;
      best = res.s_sq;
      stalled = 0;
    } else {
      ++stalled;
    }
    if (best_residual <= polish_tol || (best_residual <= opts.res_tol && stalled >= 20)) break;
    if (it == opts.max_iter) break;
    const VectorXd proposal = e.inv_p().cwiseQuotient(q);
    VectorXd next = opts.damping * proposal + (1.0 - opts.damping) * res.s_sq;
    next /= next.sum();
    if (!next.allFinite() || next.minCoeff() <= 0.0) {
      throw Error(ErrorKind::NumericalAnomaly, "s-system iterate left the positive orthant");
    }
    res.s_sq = std::move(next);
  }
  res.s_sq = best;
  res.residual = best_residual;
  res.converged = best_residual <= opts.res_tol;
  return res;
}

GaussCert build_C(const VectorSystem& sys, const Exponents& e, const VectorXd& s_sq) {
  if (s_sq.size() != sys.n() || s_sq.minCoeff() <= 0.0) {
    throw Error(ErrorKind::Domain, "build_C needs n positive weights s_j^2");
  }
  const MatrixXd M = weighted_gram(sys, s_sq);
  Eigen::LDLT<MatrixXd> ldlt(M);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw Error(ErrorKind::NumericalAnomaly, "M(s) is not invertible");
  }
  GaussCert cert;
  cert.C = ldlt.solve(MatrixXd::Identity(sys.k(), sys.k()));
  cert.C = 0.5 * (cert.C + cert.C.transpose());
  cert.s_sq = s_sq;
  cert.sigma = diffusivities(sys, cert.C);
  for (int j = 0; j < sys.n(); ++j) {
    if (!(cert.sigma[j] > 0.0)) {
      std::ostringstream msg;
      msg << "<C a_" << j + 1 << ", a_" << j + 1 << "> <= 0";
      throw Error(ErrorKind::CertificateRejected, msg.str());
    }
  }
  cert.residual = 0.0;
  for (int j = 0; j < sys.n(); ++j) {
    const double p = 1.0 / e[j];
    cert.residual = std::max(cert.residual, std::abs(e[j] - s_sq[j] * cert.sigma[j]) * p);
  }
  return cert;
}

double verify_findC(const VectorSystem& sys, const Exponents& e, const GaussCert& cert) {
  const VectorXd w = e.inv_p().cwiseQuotient(cert.sigma);
  const int k = sys.k();
  return (sys.A() * w.asDiagonal() * sys.A().transpose() * cert.C - MatrixXd::Identity(k, k)).norm();
}

ProjectionReport projection_check(const VectorSystem& sys, const GaussCert& cert, double tol) {
  if (cert.s_sq.size() != sys.n()) {
    throw Error(ErrorKind::Structural, "projection_check needs a solver certificate (s^2)");
  }
  ProjectionReport rep;
  const MatrixXd AS = sys.A() * cert.s_sq.cwiseSqrt().asDiagonal();
  rep.P = AS.transpose() * cert.C * AS;
  rep.asymmetry = (rep.P - rep.P.transpose()).cwiseAbs().maxCoeff();
  rep.idempotency = (rep.P * rep.P - rep.P).norm();
  const MatrixXd Ps = 0.5 * (rep.P + rep.P.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Ps, Eigen::EigenvaluesOnly);
  rep.eigenvalues = es.eigenvalues();
  rep.eig_distance = 0.0;
  for (int i = 0; i < rep.eigenvalues.size(); ++i) {
    const double l = rep.eigenvalues[i];
    rep.eig_distance = std::max(rep.eig_distance, std::min(std::abs(l), std::abs(l - 1.0)));
  }
  rep.rank = numerical_rank(rep.P, 1e-9);
  rep.trace = rep.P.trace();
  const MatrixXd bound = sys.A().transpose() * cert.C * sys.A() -
                         MatrixXd(cert.s_sq.cwiseInverse().asDiagonal());
  rep.diag_bound_max_eig = max_eigenvalue(0.5 * (bound + bound.transpose()));
  const double bound_scale = cert.s_sq.cwiseInverse().maxCoeff();
  rep.pass = rep.idempotency <= tol && rep.asymmetry <= tol && rep.eig_distance <= tol &&
             rep.rank == sys.k() && std::abs(rep.trace - sys.k()) <= tol &&
             rep.diag_bound_max_eig <= tol * bound_scale;
  return rep;
}

CertificateRun solve_certificate(const VectorSystem& sys, const Exponents& e, const Tolerances& tol) {
  CertificateRun run;
  const FinitenessVerdict fin = is_finite(sys, e, tol.boundary_tol, tol.basis_tol);
  run.solve = solve_s_system(sys, e, {tol.damping, tol.max_iter, tol.res_tol});
  run.cert = build_C(sys, e, run.solve.s_sq);
  run.built = true;
  if (fin.verdict != Membership::Inside) {
    run.cert.warnings.push_back("exponents are " + to_string(fin.verdict) +
                                " of K; the s-system need not be solvable");
  } else if (fin.slack < 1e-6) {
    run.cert.warnings.push_back("exponents are within 1e-6 of the boundary of K; convergence may stall");
  }
  if (!run.solve.converged) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "s-system did not converge in " << run.solve.iterations
        << " iterations (residual " << run.solve.residual << ")";
    run.cert.warnings.push_back(msg.str());
  }
  run.findC_defect = verify_findC(sys, e, run.cert);
  run.projection = projection_check(sys, run.cert, tol.projection_tol);
  return run;
}

}  // namespace blflow
