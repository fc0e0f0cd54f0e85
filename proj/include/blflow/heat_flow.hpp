#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blflow/bellman.hpp"
#include "blflow/core_model.hpp"

namespace blflow {

/// Gaussian envelope |u(y)| <= b exp(-delta y^2).
struct Domination {
  double b = 0.0;
  double delta = 0.0;

  /// Envelope of the heat extension at time t with diffusivity sigma:
  /// b (1 + 4 t delta sigma)^(-1/2) exp(-delta y^2 / (1 + 4 t delta sigma)).
  Domination at(double t, double sigma) const;
  double operator()(double y) const;
};

/// Initial data drawn from a small catalog of functions in E(R).
class ProfileSpec {
 public:
  enum class Kind { Box, Gaussian, SumOfBoxes };

  struct Box {
    double lo = 0.0;
    double hi = 1.0;
    double height = 1.0;
  };

  /// height on [lo, hi], zero elsewhere.
  static ProfileSpec box(double lo, double hi, double height);
  /// amplitude * exp(-(y - center)^2 / (2 variance)).
  static ProfileSpec gaussian(double amplitude, double center, double variance);
  static ProfileSpec sum_of_boxes(std::vector<Box> boxes);

  Kind kind() const { return kind_; }
  const std::vector<Box>& boxes() const { return boxes_; }
  double amplitude() const { return amplitude_; }
  double center() const { return center_; }
  double variance() const { return variance_; }

  double value(double y) const;
  double mass() const;
  const Domination& domination() const { return dom_; }
  /// Points where the initial data is discontinuous.
  std::vector<double> breakpoints() const;

 private:
  ProfileSpec() = default;
  void compute_domination();

  Kind kind_ = Kind::Box;
  std::vector<Box> boxes_;
  double amplitude_ = 0.0, center_ = 0.0, variance_ = 0.0;
  Domination dom_;
};

std::string to_string(ProfileSpec::Kind k);

/// Solution of u_t = sigma u_yy with u(., 0) = profile, via closed forms
/// (error functions for boxes, variance growth 2 sigma t for Gaussians).
double heat_extension(const ProfileSpec& u, double sigma, double y, double t);
/// d/dy of heat_extension.
double heat_extension_dy(const ProfileSpec& u, double sigma, double y, double t);

struct EnergyOptions {
  double quad_tol = 1e-10;
  int initial_panels = 0;  // 0: choose by dimension
  int max_levels = -1;     // -1: choose by dimension
};

struct QuadMeta {
  double half_width = 0.0;
  int points_per_axis = 0;
  int refinement = 0;
  bool converged = false;
};

struct EnergyValue {
  double value = 0.0;
  QuadMeta meta;
};

/// Integral over R^k of B(u_1(<a_1,x>, t), ..., u_n(<a_n,x>, t)) with
/// diffusivities sigma_j = <C a_j, a_j>. Throws UnsupportedScale for k > 3.
EnergyValue bellman_energy(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                           const std::vector<ProfileSpec>& profiles, double t,
                           const EnergyOptions& opts = {});

struct RhsValue {
  double value = 0.0;         // quadrature
  double closed_form = 0.0;   // product-of-Gaussians evaluation
  bool has_closed_form = false;
  QuadMeta meta;
};

/// Integral of B(..., m_j (pi sigma_j)^(-1/2) exp(-<a_j,x>^2 / sigma_j), ...),
/// the t -> infinity limit of the energy. For monomial B (the whole catalog)
/// the closed form is reported alongside the quadrature.
RhsValue rhs_limit(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                   const VectorXd& masses, const EnergyOptions& opts = {});

/// Closed form of rhs_limit for monomial B via the Gaussian determinant identity.
double rhs_limit_closed_form(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                             const VectorXd& masses);

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<QuadMeta> quad_meta;
};

/// {0} and one point per decade from 1e-2 to tmax (plus tmax itself), or
/// `points` log-spaced positive times when points > 0.
std::vector<double> default_time_grid(double tmax = 1e3, int points = 0);

struct ScanResult {
  EnergyTrace trace;
  bool certified = false;     // C passed check_L3 for B
  bool monotone = false;
  bool quadrature_ok = false;
  double max_drop = 0.0;      // largest B(t_i) - B(t_j) over i < j
  double mono_tol = 0.0;
  double initial = 0.0;       // energy at t = 0 (direct integral)
  double rhs = 0.0;           // t -> infinity limit
  double final_gap = 0.0;     // rhs - B(t_last)
  double max_excess = 0.0;    // max_i B(t_i) - rhs (main inequality: <= mono_tol)
  std::string verdict;        // "monotone", "violated", "no certificate", "anomaly"
};

ScanResult monotonicity_scan(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                             const std::vector<ProfileSpec>& profiles,
                             const std::vector<double>& times, const EnergyOptions& opts = {});

struct ProbeSteps {
  double h_t = 1e-4;
  double h_x = 1e-3;
};

struct ProbeResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double defect = 0.0;
  bool pass = false;
};

/// (d/dt - sum c_ij d^2/dx_i dx_j) B(u(x,t)) by central differences against
/// -<((A^T C A) . Hess B(u)) u', u'> from analytic derivatives.
/// Throws Domain when t < 10 h_t.
ProbeResult bellman_identity_probe(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                                   const std::vector<ProfileSpec>& profiles, double t,
                                   const VectorXd& x, const ProbeSteps& steps = {});

}  // namespace blflow
