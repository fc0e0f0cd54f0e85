#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace blflow {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int order);

struct CubeQuadOptions {
  double tol = 1e-10;          // stop when successive refinements differ by < tol (relative)
  double abs_floor = 1e-300;   // absolute floor for the relative test
  int initial_panels = 16;     // per axis, before breakpoints are inserted
  int max_levels = 10;         // panel doublings
  int order = 8;               // Gauss-Legendre points per panel
  std::vector<std::vector<double>> breakpoints;  // per-axis panel edges to honour
};

struct CubeQuadResult {
  double value = 0.0;
  double half_width = 0.0;
  int panels_per_axis = 0;
  int points_per_axis = 0;
  int refinement = 0;
  double last_change = 0.0;
  bool converged = false;
};

using Integrand = std::function<double(const Eigen::VectorXd&)>;

/// Composite tensor Gauss-Legendre quadrature over [-L, L]^dim with panel
/// doubling until two successive values agree to opts.tol. Breakpoints are
/// kept as panel edges so piecewise-smooth integrands converge. Summation
/// order is fixed regardless of thread count.
CubeQuadResult integrate_cube(const Integrand& f, int dim, double L,
                              const CubeQuadOptions& opts);

/// One fixed-resolution pass (no refinement); exposed for tests.
double integrate_cube_fixed(const Integrand& f, int dim, const std::vector<std::vector<double>>& edges,
                            const GaussLegendre& rule);

}  // namespace blflow
