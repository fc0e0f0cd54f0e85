#include "blflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blflow/error.hpp"
#include "blflow/parallel.hpp"

namespace blflow {

GaussLegendre gauss_legendre(int order) {
  GaussLegendre rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  // Newton on P_order starting from the Chebyshev-like guess.
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int m = 2; m <= order; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = rule.weights[order - 1 - i] = w;
  }
  return rule;
}

namespace {

std::vector<double> axis_edges(double L, int panels, const std::vector<double>& breaks) {
  std::vector<double> edges;
  edges.reserve(panels + 1 + breaks.size());
  for (int i = 0; i <= panels; ++i) edges.push_back(-L + 2.0 * L * i / panels);
  for (double b : breaks) {
    if (b > -L && b < L) edges.push_back(b);
  }
  std::sort(edges.begin(), edges.end());
  const double eps = 1e-12 * L;
  std::vector<double> out;
  for (double e : edges) {
    if (out.empty() || e - out.back() > eps) out.push_back(e);
  }
  out.back() = L;
  return out;
}

std::vector<std::pair<double, double>> axis_nodes(const std::vector<double>& edges,
                                                  const GaussLegendre& rule) {
  std::vector<std::pair<double, double>> nw;
  nw.reserve((edges.size() - 1) * rule.nodes.size());
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      nw.emplace_back(mid + half * rule.nodes[q], half * rule.weights[q]);
    }
  }
  return nw;
}

}  // namespace

double integrate_cube_fixed(const Integrand& f, int dim,
                            const std::vector<std::vector<double>>& edges,
                            const GaussLegendre& rule) {
  std::vector<std::vector<std::pair<double, double>>> nodes(dim);
  for (int d = 0; d < dim; ++d) nodes[d] = axis_nodes(edges[d], rule);
  const std::size_t outer = nodes[0].size();
  std::vector<double> partial(outer, 0.0);
  parallel_for(outer, [&](std::size_t i0) {
    Eigen::VectorXd x(dim);
    x[0] = nodes[0][i0].first;
    const double w0 = nodes[0][i0].second;
    double acc = 0.0;
    if (dim == 1) {
      acc = f(x);
    } else if (dim == 2) {
      for (const auto& [x1, w1] : nodes[1]) {
        x[1] = x1;
        acc += w1 * f(x);
      }
    } else {
      for (const auto& [x1, w1] : nodes[1]) {
        x[1] = x1;
        double inner = 0.0;
        for (const auto& [x2, w2] : nodes[2]) {
          x[2] = x2;
          inner += w2 * f(x);
        }
        acc += w1 * inner;
      }
    }
    partial[i0] = w0 * acc;
  }, 8);
  // pairwise reduction for reproducibility and accuracy
  std::size_t len = partial.size();
  while (len > 1) {
    const std::size_t half = (len + 1) / 2;
    for (std::size_t i = 0; i + half < len; ++i) partial[i] += partial[i + half];
    len = half;
  }
  return partial.empty() ? 0.0 : partial[0];
}

CubeQuadResult integrate_cube(const Integrand& f, int dim, double L,
                              const CubeQuadOptions& opts) {
  if (dim < 1 || dim > 3) {
    throw Error(ErrorKind::UnsupportedScale, "tensor quadrature supports dimensions 1..3");
  }
  const GaussLegendre rule = gauss_legendre(opts.order);
  CubeQuadResult res;
  res.half_width = L;
  double prev = 0.0;
  for (int level = 0; level <= opts.max_levels; ++level) {
    const int panels = opts.initial_panels << level;
    std::vector<std::vector<double>> edges(dim);
    for (int d = 0; d < dim; ++d) {
      static const std::vector<double> none;
      edges[d] = axis_edges(L, panels,
                            d < static_cast<int>(opts.breakpoints.size()) ? opts.breakpoints[d] : none);
    }
    const double value = integrate_cube_fixed(f, dim, edges, rule);
    res.value = value;
    res.refinement = level;
    res.panels_per_axis = static_cast<int>(edges[0].size()) - 1;
    res.points_per_axis = res.panels_per_axis * opts.order;
    if (level > 0) {
      res.last_change = std::abs(value - prev);
      if (res.last_change <= opts.tol * std::abs(value) + opts.abs_floor) {
        res.converged = true;
        return res;
      }
    }
    prev = value;
  }
  return res;
}

}  // namespace blflow
