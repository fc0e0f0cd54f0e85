#pragma once

#include <random>
#include <vector>

#include "blflow/bellman.hpp"
#include "blflow/core_model.hpp"

namespace th {

using blflow::BellmanSpec;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd young_A() { return (MatrixXd(2, 3) << 1, 1, 0, 0, -1, 1).finished(); }
inline VectorXd young_e() { return VectorXd::Constant(3, 2.0 / 3.0); }
inline MatrixXd holder_A() { return (MatrixXd(1, 2) << 1, 1).finished(); }
inline MatrixXd nazarov_A() {
  return (MatrixXd(2, 3) << 0, 0, 1.0 / std::sqrt(2.0), 1, 1, 0).finished();
}
inline MatrixXd nazarov_C() { return (MatrixXd(2, 2) << 2, 0, 0, 1).finished(); }
inline BellmanSpec nazarov_B() {
  return BellmanSpec::lifted(blflow::Section::sqrt(), VectorXd::Ones(1), 1.0, 0);
}

inline VectorXd uniform_vector(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline VectorXd log_uniform_vector(std::mt19937_64& rng, int n, double lo, double hi) {
  return uniform_vector(rng, n, std::log(lo), std::log(hi)).array().exp();
}

// A random member of the catalog.
inline BellmanSpec random_bellman(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 3), size(1, 4);
  std::uniform_real_distribution<double> a(0.1, 0.9), m(0.5, 3.0);
  switch (kind(rng)) {
    case 0: {
      const int n = size(rng) + 1;
      VectorXd alpha(n);
      for (int j = 0; j < n; ++j) alpha[j] = a(rng);
      return BellmanSpec::young(alpha);
    }
    case 1:
      return BellmanSpec::product(size(rng), m(rng));
    case 2: {
      const int pre = size(rng) - 1;
      VectorXd alpha(pre);
      for (int j = 0; j < pre; ++j) alpha[j] = a(rng);
      return BellmanSpec::lifted(blflow::Section::sqrt(), alpha, m(rng));
    }
    default: {
      const int pre = size(rng) - 1;
      VectorXd alpha(pre);
      for (int j = 0; j < pre; ++j) alpha[j] = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
      std::uniform_int_distribution<int> at(0, pre);
      return BellmanSpec::lifted(blflow::Section::weighted_geometric(a(rng)), alpha, m(rng), at(rng));
    }
  }
}

// Random full-rank k x n system with entries in [-2, 2].
inline MatrixXd random_system(std::mt19937_64& rng, int k, int n) {
  while (true) {
    MatrixXd A = MatrixXd::NullaryExpr(k, n, [&] {
      return std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    });
    Eigen::JacobiSVD<MatrixXd> svd(A);
    bool columns_ok = true;
    for (int j = 0; j < n; ++j) columns_ok = columns_ok && A.col(j).norm() > 0.2;
    if (columns_ok && svd.singularValues()[k - 1] > 0.1 * svd.singularValues()[0]) return A;
  }
}

}  // namespace th
