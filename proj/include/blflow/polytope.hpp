#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blflow/core_model.hpp"

namespace blflow {

/// Indicator vectors of the k-subsets of columns that form a basis of R^k,
/// in lexicographic order of the index sets.
struct BasisIndicatorSet {
  int n = 0;
  int k = 0;
  std::vector<std::vector<int>> subsets;  // zero-based column indices
  Eigen::MatrixXd vectors;                // n x m, one indicator per column

  int size() const { return static_cast<int>(subsets.size()); }
};

/// Throws Structural when no k-subset is a basis.
BasisIndicatorSet enumerate_bases(const VectorSystem& sys, double basis_tol = 1e-9);

enum class Membership { Inside, Boundary, Outside };

std::string to_string(Membership m);

struct FinitenessVerdict {
  Membership verdict = Membership::Outside;
  Eigen::VectorXd weights;  // convex weights over the basis list (members only)
  double slack = 0.0;       // max over representations of the minimum weight
  int basis_count = 0;
};

/// Decides whether e lies in the convex hull K of the basis indicators.
/// Inside means e is a strictly positive convex combination of all vertices
/// (the relative interior of K) with min weight > boundary_tol.
FinitenessVerdict is_finite(const VectorSystem& sys, const Exponents& e,
                            double boundary_tol = 1e-9, double basis_tol = 1e-9);

FinitenessVerdict is_finite(const BasisIndicatorSet& bases, const Exponents& e,
                            double boundary_tol = 1e-9);

}  // namespace blflow
