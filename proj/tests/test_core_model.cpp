#include <doctest.h>

#include <random>

#include "blflow/bellman.hpp"
#include "blflow/core_model.hpp"
#include "blflow/linalg.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace blflow;
using Eigen::Matrix2d;

TEST_SUITE("core_model") {

TEST_CASE("vector system invariants") {
  CHECK_NOTHROW(VectorSystem(th::young_A()));
  CHECK_THROWS_AS(VectorSystem(MatrixXd(0, 3)), Error);
  // k > n
  CHECK_THROWS_AS(VectorSystem(MatrixXd::Identity(3, 2)), Error);
  // zero column
  CHECK_THROWS_AS(VectorSystem((MatrixXd(2, 3) << 1, 0, 0, 0, 0, 1).finished()), Error);
  try {
    VectorSystem((MatrixXd(2, 3) << 1, 2, 3, 2, 4, 6).finished());
    FAIL("rank-deficient system accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Structural);
    CHECK(std::string(e.what()) == "rank(A) < k");
  }
  CHECK_THROWS_AS(VectorSystem((MatrixXd(1, 2) << 1, NAN).finished()), Error);

  VectorSystem sys(th::young_A());
  const VectorSystem q = sys.permuted({2, 0, 1});
  CHECK(q.column(0) == sys.column(2));
  CHECK(q.column(1) == sys.column(0));
}

TEST_CASE("exponents") {
  const Exponents e = Exponents::from_p(Eigen::Vector3d(1.5, 1.5, 1.5));
  CHECK(e.sums_to(2));
  CHECK_NOTHROW(e.require_unit_interval());
  CHECK_THROWS_AS(Exponents(Eigen::Vector2d(1.5, 0.5)).require_unit_interval(), Error);
  CHECK_THROWS_AS(Exponents(Eigen::Vector2d(0.0, 0.5)).require_unit_interval(), Error);
  CHECK_THROWS_AS(Exponents(Eigen::Vector2d(0.5, 0.5)).require_sum(2), Error);
  // construction accepts arbitrary finite points
  CHECK_NOTHROW(Exponents(Eigen::Vector3d(1, 1, 1)));
}

TEST_CASE("euler check examples") {
  const auto a = euler_check(BellmanSpec::young(Eigen::Vector2d(0.5, 0.5)), Eigen::Vector2d(1, 1), 1);
  CHECK(a.defect == 0.0);
  CHECK(a.pass);

  const BellmanSpec P = BellmanSpec::product(2);
  CHECK(P.gradient(Eigen::Vector2d(2, 3)).dot(Eigen::Vector2d(2, 3)) == doctest::Approx(12.0));
  CHECK(euler_check(P, Eigen::Vector2d(2, 3), 2).defect == 0.0);

  const BellmanSpec L = lift_section("sqrt", VectorXd::Constant(1, 0.5));
  const auto c = euler_check(L, Eigen::Vector3d(4, 1, 1), L.degree());
  CHECK(c.defect <= 1e-12);
  CHECK(L.degree() == 1.5);
  // with the wrong degree the defect is visible
  CHECK_FALSE(euler_check(L, Eigen::Vector3d(4, 1, 1), 2).pass);

  CHECK_THROWS_AS(euler_check(P, Eigen::Vector2d(0, 1), 2), Error);
  CHECK_THROWS_AS(euler_check(P, Eigen::Vector2d(-1, 1), 2), Error);
}

TEST_CASE("psd_leq_zero examples") {
  CHECK(psd_leq_zero(MatrixXd::Zero(2, 2), 1e-9));
  CHECK(psd_leq_zero(Eigen::Vector2d(-1, -2).asDiagonal().toDenseMatrix(), 1e-9));
  CHECK_FALSE(psd_leq_zero((MatrixXd(2, 2) << -1, 2, 2, -1).finished(), 1e-9));
  CHECK_THROWS_AS(psd_leq_zero((MatrixXd(2, 2) << -1, 2, 1, -1).finished(), 1e-9), Error);
}

TEST_CASE("numerical_rank examples") {
  CHECK(numerical_rank(MatrixXd::Identity(3, 3)) == 3);
  const Eigen::Vector3d v(1, 1, 0);
  CHECK(numerical_rank(v * v.transpose()) == 1);
  CHECK(numerical_rank(MatrixXd::Zero(3, 3)) == 0);
}

TEST_CASE("lift_section examples") {
  const BellmanSpec a = lift_section("sqrt", VectorXd(0));
  CHECK(a.arity() == 2);
  CHECK(a.degree() == 1.0);
  CHECK(a.value(Eigen::Vector2d(4, 9)) == doctest::Approx(6.0));

  const BellmanSpec b = lift_section("sqrt", VectorXd::Constant(1, 0.5));
  CHECK(b.value(Eigen::Vector3d(4, 2, 8)) == doctest::Approx(2.0 * 4.0));

  const BellmanSpec c = lift_section("sqrt", VectorXd::Constant(3, 1.0 / 3.0));
  CHECK(c.arity() == 5);
  CHECK(c.degree() == doctest::Approx(2.0));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    CHECK(euler_check(c, th::log_uniform_vector(rng, 5, 0.1, 10), 2).pass);
  }

  CHECK_THROWS_AS(lift_section("min", VectorXd(0)), Error);
  CHECK_THROWS_AS(lift_section("geomean:abc", VectorXd(0)), Error);
  const BellmanSpec g = lift_section("geomean:0.25", VectorXd(0));
  CHECK(g.value(Eigen::Vector2d(16, 1)) == doctest::Approx(2.0));
}

TEST_CASE("catalog validation") {
  CHECK_THROWS_AS(BellmanSpec::young(Eigen::Vector2d(1.0, 0.5)), Error);
  CHECK_THROWS_AS(BellmanSpec::young(Eigen::Vector2d(0.0, 0.5)), Error);
  CHECK_THROWS_AS(BellmanSpec::product(0), Error);
  CHECK_THROWS_AS(BellmanSpec::product(2, -1.0), Error);
  CHECK_THROWS_AS(Section::weighted_geometric(1.0), Error);
  const BellmanSpec Y = BellmanSpec::young(Eigen::Vector2d(0.5, 0.5));
  CHECK(Y.value(Eigen::Vector2d(0, 3)) == 0.0);
  CHECK_THROWS_AS(Y.value(Eigen::Vector2d(-1, 3)), Error);
  CHECK_THROWS_AS(Y.gradient(Eigen::Vector2d(0, 3)), Error);
  CHECK_THROWS_AS(Y.hessian(Eigen::Vector2d(0, 3)), Error);
  CHECK_THROWS_AS(Y.value(Eigen::Vector3d(1, 1, 1)), Error);
}

TEST_CASE("monomial form reproduces the value") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const BellmanSpec B = th::random_bellman(rng);
    const VectorXd y = th::log_uniform_vector(rng, B.arity(), 0.1, 10);
    const auto [M, gamma] = B.monomial();
    double v = M;
    for (int j = 0; j < y.size(); ++j) v *= std::pow(y[j], gamma[j]);
    CHECK(oracle::rel(B.value(y), v) <= 1e-12);
    CHECK(gamma.sum() == doctest::Approx(B.degree()).epsilon(1e-12));
  }
}

// Property suites over random catalog members.
TEST_CASE("property: Euler homogeneity") {
  std::mt19937_64 rng(1);
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const BellmanSpec B = th::random_bellman(rng);
    const VectorXd y = th::log_uniform_vector(rng, B.arity(), 1e-2, 1e2);
    const EulerCheck r = euler_check(B, y, B.degree());
    failures += !(r.pass && r.defect <= 1e-8 * (1.0 + std::abs(B.value(y))));
  }
  CHECK(failures == 0);
}

TEST_CASE("property: gradient and Hessian match finite differences") {
  std::mt19937_64 rng(2);
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const BellmanSpec B = th::random_bellman(rng);
    const VectorXd y = th::uniform_vector(rng, B.arity(), 0.5, 2.0);
    const VectorXd g = B.gradient(y);
    const VectorXd gfd = oracle::fd_gradient([&](const VectorXd& z) { return B.value(z); }, y, 1e-5);
    const MatrixXd H = B.hessian(y);
    const MatrixXd Hfd = oracle::fd_jacobian([&](const VectorXd& z) { return B.gradient(z); }, y, 1e-5);
    const double gerr = (g - gfd).norm() / std::max(1.0, g.norm());
    const double herr = (H - Hfd).norm() / std::max(1.0, H.norm());
    const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
    failures += !(gerr <= 1e-6 && herr <= 1e-6 && asym <= 1e-10);
  }
  CHECK(failures == 0);
}

TEST_CASE("property: Young Hessian closed form") {
  std::mt19937_64 rng(3);
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 4;
    const VectorXd alpha = th::uniform_vector(rng, n, 0.05, 0.95);
    const BellmanSpec B = BellmanSpec::young(alpha);
    const VectorXd y = th::log_uniform_vector(rng, n, 1e-1, 1e1);
    const double b = B.value(y);
    MatrixXd H(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        H(i, j) = b * alpha[i] * alpha[j] / (y[i] * y[j]) - (i == j ? b * alpha[j] / (y[j] * y[j]) : 0.0);
      }
    }
    failures += !((B.hessian(y) - H).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, H.cwiseAbs().maxCoeff()));
  }
  CHECK(failures == 0);
}

TEST_CASE("certificate from an explicit matrix") {
  VectorSystem sys(th::nazarov_A());
  const GaussCert c = certificate_from_matrix(sys, th::nazarov_C());
  CHECK(c.sigma.isApprox(Eigen::Vector3d(1, 1, 1)));
  CHECK(c.s_sq.size() == 0);
  CHECK_THROWS_AS(certificate_from_matrix(sys, (MatrixXd(2, 2) << 1, 0.5, 0, 1).finished()), Error);
}

}
