#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "blflow/bellman.hpp"
#include "blflow/core_model.hpp"

namespace blflow {

/// Deterministic interior sample points, log-uniform on [lo, hi]^n.
struct Sampler {
  int count = 1000;
  std::uint64_t seed = 0;
  double lo = 1e-2;
  double hi = 1e2;

  std::vector<VectorXd> draw(int n) const;
};

/// {<C a_i, a_j> * d^2 B / dy_i dy_j}, the Hadamard product (A^T C A) . Hess B(y).
MatrixXd hadamard_form(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                       const VectorXd& y);

/// D(y) = diag(y_j / <C a_j, a_j>).
MatrixXd bellman_weight(const VectorSystem& sys, const MatrixXd& C, const VectorXd& y);

struct L3Result {
  bool pass = false;
  bool sigma_positive = false;
  double worst_max_eig = 0.0;  // relative to ||hadamard||_max at that point
  VectorXd worst_point;
  bool separately_concave = false;  // diagonal entries <= tol everywhere
};

/// psd_leq_zero of hadamard_form at every sample, plus sigma_j > 0.
L3Result check_L3(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                  const Sampler& sampler, double tol = 1e-9);

/// A^T C A <= diag(sigma_j / alpha_j): the Young-only equivalent of L3.
bool young_diag_bound(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                      double tol = 1e-9);

struct PdeResult {
  double worst_defect = 0.0;      // normalized
  double worst_raw_defect = 0.0;  // unnormalized Frobenius norm at the worst point
  VectorXd worst_point;
  bool pass = false;
};

/// ||A D(y) [(A^T C A) . Hess B(y)]||_F divided by
/// ||A|| ||D(y)|| ||A^T C A||_max ||Hess B(y)|| (Frobenius norms).
double pde_defect(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                  const VectorXd& y);

PdeResult check_pde_identity(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                             const Sampler& sampler, double pde_tol = 1e-8);

struct RankResult {
  int worst_rank = 0;
  int bound = 0;
  std::vector<int> histogram;  // histogram[r] = samples with rank r
  bool pass = false;
};

/// numerical_rank of the Hadamard form against the bound n - k.
RankResult check_rank_bound(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                            const Sampler& sampler, double rank_tol = 1e-9);

struct KnStructure {
  bool pass = false;
  double worst_diagonal = 0.0;  // max |d^2 B / dy_j^2| / (1 + |B|) over samples
};

/// Diagonal Hessian entries vanish at every sample (<= tol relative to 1+|B|).
KnStructure check_kn_structure(const BellmanSpec& B, const Sampler& sampler, double tol = 1e-10);

struct L5Result {
  bool converged = false;
  bool anomaly = false;
  double value = 0.0;
  std::vector<double> half_widths;
  std::vector<double> values;
};

/// Integral of B(exp(-<a_1,x>^2), ..., exp(-<a_n,x>^2)) over [-L, L]^k for
/// L in {4, 6, 8, 10}; converged iff the last two values differ by < rel_tol.
L5Result check_L5(const VectorSystem& sys, const BellmanSpec& B, double rel_tol = 1e-6,
                  std::vector<double> half_widths = {4.0, 6.0, 8.0, 10.0});

struct VerifierReport {
  L3Result l3;
  PdeResult pde;
  RankResult rank;
  double euler_defect = 0.0;  // worst relative Euler defect against degree k
  bool euler_pass = false;
  L5Result l5;
  int samples = 0;
  std::uint64_t seed = 0;
  Tolerances tolerances;

  bool pass() const {
    return l3.pass && pde.pass && rank.pass && euler_pass && l5.converged;
  }
};

VerifierReport verify(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                      const Sampler& sampler, const Tolerances& tol = {});

}  // namespace blflow
