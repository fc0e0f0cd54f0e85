#include "blflow/verifier.hpp"

#include <cmath>
#include <random>

#include "blflow/linalg.hpp"
#include "blflow/parallel.hpp"
#include "blflow/quadrature.hpp"

namespace blflow {

std::vector<VectorXd> Sampler::draw(int n) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  std::vector<VectorXd> pts(count, VectorXd(n));
  for (auto& p : pts) {
    for (int j = 0; j < n; ++j) p[j] = std::exp(u(rng));
  }
  return pts;
}

MatrixXd hadamard_form(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                       const VectorXd& y) {
  if (B.arity() != sys.n()) throw Error(ErrorKind::Structural, "B arity differs from n");
  const MatrixXd G = sys.A().transpose() * C * sys.A();
  return G.cwiseProduct(B.hessian(y));
}

MatrixXd bellman_weight(const VectorSystem& sys, const MatrixXd& C, const VectorXd& y) {
  return y.cwiseQuotient(diffusivities(sys, C)).asDiagonal();
}

L3Result check_L3(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                  const Sampler& sampler, double tol) {
  L3Result res;
  const VectorXd sigma = diffusivities(sys, C);
  res.sigma_positive = sigma.minCoeff() > 0.0;
  const auto pts = sampler.draw(sys.n());
  std::vector<double> eig(pts.size()), diag(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const MatrixXd H = hadamard_form(sys, C, B, pts[i]);
    const double hmax = H.cwiseAbs().maxCoeff();
    const double scale = hmax > 0.0 ? hmax : 1.0;
    eig[i] = max_eigenvalue(0.5 * (H + H.transpose())) / scale;
    diag[i] = H.diagonal().maxCoeff() / scale;
  });
  res.worst_max_eig = -INFINITY;
  double worst_diag = -INFINITY;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (eig[i] > res.worst_max_eig) {
      res.worst_max_eig = eig[i];
      res.worst_point = pts[i];
    }
    worst_diag = std::max(worst_diag, diag[i]);
  }
  res.separately_concave = worst_diag <= tol;
  res.pass = res.sigma_positive && res.worst_max_eig <= tol;
  return res;
}

bool young_diag_bound(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                      double tol) {
  if (B.variant() != BellmanSpec::Variant::Young) {
    throw Error(ErrorKind::Input, "diag bound applies to Young functions only");
  }
  const MatrixXd G = sys.A().transpose() * C * sys.A();
  const VectorXd bound = G.diagonal().cwiseQuotient(B.alpha());  // 1/s_j^2
  const MatrixXd M = G - MatrixXd(bound.asDiagonal());
  const double mmax = M.cwiseAbs().maxCoeff();
  const double scale = mmax > 0.0 ? mmax : 1.0;
  return max_eigenvalue(0.5 * (M + M.transpose())) <= tol * scale;
}

double pde_defect(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                  const VectorXd& y) {
  const MatrixXd H = B.hessian(y);
  const MatrixXd G = sys.A().transpose() * C * sys.A();
  const MatrixXd D = bellman_weight(sys, C, y);
  const double raw = (sys.A() * D * G.cwiseProduct(H)).norm();
  const double scale = sys.A().norm() * D.norm() * G.cwiseAbs().maxCoeff() * H.norm();
  return scale > 0.0 ? raw / scale : raw;
}

PdeResult check_pde_identity(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                             const Sampler& sampler, double pde_tol) {
  PdeResult res;
  const auto pts = sampler.draw(sys.n());
  std::vector<double> d(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { d[i] = pde_defect(sys, C, B, pts[i]); });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == 0 || d[i] > res.worst_defect) {
      res.worst_defect = d[i];
      res.worst_point = pts[i];
    }
  }
  if (res.worst_point.size()) {
    const MatrixXd G = sys.A().transpose() * C * sys.A();
    res.worst_raw_defect =
        (sys.A() * bellman_weight(sys, C, res.worst_point) * G.cwiseProduct(B.hessian(res.worst_point)))
            .norm();
  }
  res.pass = res.worst_defect <= pde_tol;
  return res;
}

RankResult check_rank_bound(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                            const Sampler& sampler, double rank_tol) {
  RankResult res;
  res.bound = sys.n() - sys.k();
  res.histogram.assign(sys.n() + 1, 0);
  const auto pts = sampler.draw(sys.n());
  std::vector<int> r(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    r[i] = numerical_rank(hadamard_form(sys, C, B, pts[i]), rank_tol);
  });
  for (int v : r) {
    ++res.histogram[v];
    res.worst_rank = std::max(res.worst_rank, v);
  }
  res.pass = res.worst_rank <= res.bound;
  return res;
}

KnStructure check_kn_structure(const BellmanSpec& B, const Sampler& sampler, double tol) {
  KnStructure res;
  for (const auto& y : sampler.draw(B.arity())) {
    const MatrixXd H = B.hessian(y);
    const double rel = H.diagonal().cwiseAbs().maxCoeff() / (1.0 + std::abs(B.value(y)));
    res.worst_diagonal = std::max(res.worst_diagonal, rel);
  }
  res.pass = res.worst_diagonal <= tol;
  return res;
}

L5Result check_L5(const VectorSystem& sys, const BellmanSpec& B, double rel_tol,
                  std::vector<double> half_widths) {
  L5Result res;
  res.half_widths = std::move(half_widths);
  const int k = sys.k();
  if (k > 3) throw Error(ErrorKind::UnsupportedScale, "L5 quadrature supports k <= 3");
  auto f = [&](const VectorXd& x) {
    VectorXd y(sys.n());
    for (int j = 0; j < sys.n(); ++j) {
      const double s = sys.A().col(j).dot(x);
      y[j] = std::exp(-s * s);
    }
    return B.value(y);
  };
  CubeQuadOptions qo;
  qo.tol = 1e-11;
  qo.initial_panels = k == 1 ? 16 : 8;
  qo.max_levels = k == 1 ? 10 : (k == 2 ? 6 : 3);
  for (double L : res.half_widths) {
    const auto q = integrate_cube(f, k, L, qo);
    res.values.push_back(q.value);
  }
  for (std::size_t i = 1; i < res.values.size(); ++i) {
    if (res.values[i] < res.values[i - 1] * (1.0 - 1e-12)) res.anomaly = true;
  }
  res.value = res.values.back();
  const double prev = res.values[res.values.size() - 2];
  res.converged = !res.anomaly && res.value > 0.0 &&
                  std::abs(res.value - prev) < rel_tol * std::abs(res.value);
  return res;
}

VerifierReport verify(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                      const Sampler& sampler, const Tolerances& tol) {
  VerifierReport rep;
  rep.samples = sampler.count;
  rep.seed = sampler.seed;
  rep.tolerances = tol;
  rep.l3 = check_L3(sys, C, B, sampler, tol.psd_tol);
  rep.pde = check_pde_identity(sys, C, B, sampler, tol.pde_tol);
  rep.rank = check_rank_bound(sys, C, B, sampler, tol.rank_tol);
  rep.euler_defect = 0.0;
  for (const auto& y : sampler.draw(sys.n())) {
    const auto ec = euler_check(B, y, sys.k(), tol.homog_tol);
    rep.euler_defect = std::max(rep.euler_defect, ec.defect / (1.0 + std::abs(B.value(y))));
  }
  rep.euler_pass = rep.euler_defect <= tol.homog_tol;
  if (sys.k() <= 3) rep.l5 = check_L5(sys, B);
  return rep;
}

}  // namespace blflow
