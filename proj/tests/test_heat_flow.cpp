#include <doctest.h>

#include <random>

#include "blflow/bellman_matrix.hpp"
#include "blflow/gaussian_constant.hpp"
#include "blflow/heat_flow.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace blflow;

namespace {

const BellmanSpec kSqrt = BellmanSpec::young(Eigen::Vector2d(0.5, 0.5));

std::vector<ProfileSpec> box_box() { return {ProfileSpec::box(0, 1, 1), ProfileSpec::box(0, 2, 1)}; }

// (4 pi t sigma)^(-1/2) integral u(x) exp(-(y - x)^2 / (4 t sigma)) dx by trapezoid.
double kernel_oracle(const ProfileSpec& u, double sigma, double y, double t) {
  const double w = std::sqrt(4.0 * t * sigma);
  auto f = [&](double x) { return u.value(x) * std::exp(-(y - x) * (y - x) / (w * w)); };
  double s = 0.0;
  if (u.kind() == ProfileSpec::Kind::Gaussian) {
    s = oracle::trapezoid(f, y - 40 * w - 40, y + 40 * w + 40, 200000);
  } else {
    for (const auto& b : u.boxes()) {
      s += b.height * oracle::trapezoid([&](double x) { return std::exp(-(y - x) * (y - x) / (w * w)); },
                                        b.lo, b.hi, 20000);
    }
  }
  return s / std::sqrt(M_PI) / w;
}

struct YoungSetup {
  VectorSystem sys{th::young_A()};
  MatrixXd C;
  VectorXd sigma;
  YoungSetup() {
    C = solve_certificate(sys, Exponents(th::young_e())).cert.C;
    sigma = diffusivities(sys, C);
  }
};

}  // namespace

TEST_SUITE("heat_flow") {

TEST_CASE("profiles and domination") {
  const ProfileSpec b = ProfileSpec::box(0, 1, 1);
  CHECK(b.mass() == 1.0);
  CHECK(b.domination().delta == 1.0);
  CHECK(b.domination().b == doctest::Approx(std::exp(1.0)));
  const ProfileSpec g = ProfileSpec::gaussian(2.0, 0.0, 0.5);
  CHECK(g.mass() == doctest::Approx(2.0 * std::sqrt(M_PI)));
  CHECK(g.domination().delta == 1.0);
  CHECK(ProfileSpec::sum_of_boxes({{0, 1, 1}, {2, 3, 0.5}}).mass() == doctest::Approx(1.5));
  CHECK_THROWS_AS(ProfileSpec::box(1, 0, 1), Error);
  CHECK_THROWS_AS(ProfileSpec::box(0, 1, -1), Error);
  CHECK_THROWS_AS(ProfileSpec::gaussian(1, 0, 0), Error);
  CHECK_THROWS_AS(ProfileSpec::sum_of_boxes({}), Error);
  CHECK(to_string(ProfileSpec::Kind::SumOfBoxes) == "sum_of_boxes");
}

TEST_CASE("heat_extension examples") {
  const ProfileSpec b = ProfileSpec::box(0, 1, 1);
  CHECK(heat_extension(b, 1.0, 0.5, 0.0) == 1.0);
  CHECK(heat_extension(b, 1.0, 1.5, 0.0) == 0.0);
  CHECK(heat_extension(b, 1.0, 0.5, 1e-12) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(heat_extension(b, 1.0, 10.0, 1.0) <= std::exp(-81.0 / 8.0));
  CHECK(heat_extension(b, 1.0, 10.0, 1.0) > 0.0);
  // far tail stays positive and accurate (no cancellation)
  const double far = heat_extension(b, 1.0, 30.0, 1.0);
  CHECK(far > 0.0);
  CHECK(oracle::rel(far, 0.5 * (std::erfc(29.0 / 2.0) - std::erfc(30.0 / 2.0))) <= 1e-10);
  CHECK_THROWS_AS(heat_extension(b, 0.0, 0.5, 1.0), Error);
  CHECK_THROWS_AS(heat_extension(b, 1.0, 0.5, -1.0), Error);
}

TEST_CASE("heat_extension against the kernel oracle") {
  const std::vector<ProfileSpec> profiles = {
      ProfileSpec::box(-0.5, 1.5, 2.0), ProfileSpec::gaussian(1.5, 0.7, 0.3),
      ProfileSpec::sum_of_boxes({{0, 1, 1}, {2, 4, 0.25}})};
  std::mt19937_64 rng(61);
  for (const auto& u : profiles) {
    for (int i = 0; i < 6; ++i) {
      const double sigma = std::uniform_real_distribution<double>(0.3, 3)(rng);
      const double t = std::uniform_real_distribution<double>(0.05, 2)(rng);
      const double y = std::uniform_real_distribution<double>(-2, 4)(rng);
      CHECK(std::abs(heat_extension(u, sigma, y, t) - kernel_oracle(u, sigma, y, t)) <= 1e-9);
    }
  }
}

TEST_CASE("heat_extension_dy matches finite differences") {
  const std::vector<ProfileSpec> profiles = {ProfileSpec::box(0, 1, 1), ProfileSpec::gaussian(1, -0.3, 2)};
  for (const auto& u : profiles) {
    for (double y : {-1.0, 0.2, 0.9, 2.5}) {
      const double h = 1e-5;
      const double fd = (heat_extension(u, 1.3, y + h, 0.4) - heat_extension(u, 1.3, y - h, 0.4)) / (2 * h);
      CHECK(std::abs(heat_extension_dy(u, 1.3, y, 0.4) - fd) <= 1e-8);
    }
  }
}

TEST_CASE("self-similar Gaussian family") {
  std::mt19937_64 rng(62);
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    const double sigma = std::uniform_real_distribution<double>(0.2, 5)(rng);
    const double t = std::uniform_real_distribution<double>(0, 100)(rng);
    const double y = std::uniform_real_distribution<double>(-10, 10)(rng);
    const ProfileSpec g = ProfileSpec::gaussian(1.0 / std::sqrt(M_PI * sigma), 0.0, sigma / 2.0);
    const double s = sigma * (4 * t + 1);
    const double expect = std::exp(-y * y / s) / std::sqrt(M_PI * s);
    failures += !(std::abs(heat_extension(g, sigma, y, t) - expect) <= 1e-12);
  }
  CHECK(failures == 0);
}

TEST_CASE("property: domination bound at time t") {
  std::mt19937_64 rng(63);
  const std::vector<ProfileSpec> profiles = {
      ProfileSpec::box(-1, 2, 1.5), ProfileSpec::gaussian(2, 0, 0.5), ProfileSpec::gaussian(1, 1.5, 0.4),
      ProfileSpec::sum_of_boxes({{-3, -2, 1}, {0, 1, 2}})};
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    const ProfileSpec& u = profiles[i % profiles.size()];
    const double sigma = std::uniform_real_distribution<double>(0.2, 3)(rng);
    const double t = i < 10 ? 0.0 : std::exp(std::uniform_real_distribution<double>(-5, 5)(rng));
    const double y = std::uniform_real_distribution<double>(-20, 20)(rng);
    const Domination d = u.domination().at(t, sigma);
    failures += !(heat_extension(u, sigma, y, t) <= d(y) * (1 + 1e-12));
  }
  CHECK(failures == 0);
}

TEST_CASE("property: mass conservation") {
  const std::vector<ProfileSpec> profiles = {
      ProfileSpec::box(0, 1, 1), ProfileSpec::gaussian(1, 0.5, 0.2),
      ProfileSpec::sum_of_boxes({{0, 1, 1}, {1.5, 2, 3}})};
  for (const auto& u : profiles) {
    for (double t : {0.01, 0.1, 1.0, 10.0}) {
      const double w = std::sqrt(4 * t) + 1;
      const double m = oracle::trapezoid([&](double y) { return heat_extension(u, 1.0, y, t); },
                                         -20 * w, 20 * w, 400000);
      CHECK(oracle::rel(m, u.mass()) <= 1e-8);
    }
  }
}

TEST_CASE("bellman_energy examples") {
  VectorSystem sys(th::holder_A());
  const MatrixXd one = MatrixXd::Ones(1, 1);
  const EnergyValue same = bellman_energy(sys, one, kSqrt, {ProfileSpec::box(0, 1, 1), ProfileSpec::box(0, 1, 1)}, 0.0);
  CHECK(std::abs(same.value - 1.0) <= 1e-10);
  CHECK(same.meta.converged);
  const EnergyValue bb = bellman_energy(sys, one, kSqrt, box_box(), 0.0);
  CHECK(std::abs(bb.value - 1.0) <= 1e-10);

  // t > 0 against a trapezoid oracle of the same integrand
  const double t = 0.3;
  const double ref = oracle::trapezoid([&](double x) {
    return std::sqrt(heat_extension(box_box()[0], 1.0, x, t) * heat_extension(box_box()[1], 1.0, x, t));
  }, -15, 17, 200000);
  CHECK(std::abs(bellman_energy(sys, one, kSqrt, box_box(), t).value - ref) <= 1e-9);

  CHECK_THROWS_AS(bellman_energy(VectorSystem(MatrixXd::Identity(4, 4)), MatrixXd::Identity(4, 4),
                                 BellmanSpec::product(4), std::vector<ProfileSpec>(4, ProfileSpec::box(0, 1, 1)), 0.0),
                  Error);
  CHECK_THROWS_AS(bellman_energy(sys, one, kSqrt, {ProfileSpec::box(0, 1, 1)}, 0.0), Error);
  CHECK_THROWS_AS(bellman_energy(sys, one, kSqrt, box_box(), -1.0), Error);
  CHECK_THROWS_AS(bellman_energy(sys, -one, kSqrt, box_box(), 1.0), Error);
}

TEST_CASE("rhs_limit examples") {
  const RhsValue h = rhs_limit(VectorSystem(th::holder_A()), MatrixXd::Ones(1, 1), kSqrt, Eigen::Vector2d(1, 2));
  CHECK(std::abs(h.value - std::sqrt(2.0)) <= 1e-10);
  REQUIRE(h.has_closed_form);
  CHECK(std::abs(h.closed_form - std::sqrt(2.0)) <= 1e-12);

  const RhsValue p = rhs_limit(VectorSystem(MatrixXd::Identity(2, 2)), MatrixXd::Identity(2, 2),
                               BellmanSpec::product(2), Eigen::Vector2d(1, 1));
  CHECK(std::abs(p.value - 1.0) <= 1e-10);
  CHECK(std::abs(p.closed_form - 1.0) <= 1e-12);

  YoungSetup y;
  const RhsValue r = rhs_limit(y.sys, y.C, BellmanSpec::young(th::young_e()), VectorXd::Ones(3));
  const double D = maximize_D(y.sys, Exponents(th::young_e())).D;
  CHECK(std::abs(r.value - D) <= 1e-8);
  CHECK(std::abs(r.closed_form - D) <= 1e-8);

  CHECK_THROWS_AS(rhs_limit(VectorSystem(th::holder_A()), MatrixXd::Ones(1, 1), kSqrt, Eigen::Vector2d(1, 0)), Error);
}

TEST_CASE("default time grid") {
  CHECK(default_time_grid() == std::vector<double>{0, 1e-2, 1e-1, 1, 10, 100, 1000});
  const auto g = default_time_grid(50.0, 5);
  REQUIRE(g.size() == 6);
  CHECK(g.front() == 0.0);
  CHECK(g[1] == doctest::Approx(1e-2));
  CHECK(g.back() == doctest::Approx(50.0));
  CHECK_THROWS_AS(default_time_grid(0.0), Error);
}

TEST_CASE("monotonicity scan: box/box rises towards sqrt 2") {
  const ScanResult s = monotonicity_scan(VectorSystem(th::holder_A()), MatrixXd::Ones(1, 1), kSqrt, box_box(),
                                         {0, 0.1, 0.3, 1, 3, 10, 1000});
  CHECK(s.verdict == "monotone");
  CHECK(s.certified);
  CHECK(std::abs(s.initial - 1.0) <= 1e-8);
  CHECK(std::abs(s.rhs - std::sqrt(2.0)) <= 1e-12);
  CHECK(s.trace.values.back() >= std::sqrt(2.0) - 1e-3);
  CHECK(s.trace.values.back() <= std::sqrt(2.0) + 1e-8);
  for (std::size_t i = 1; i < s.trace.values.size(); ++i) {
    CHECK(s.trace.values[i] > s.trace.values[i - 1]);
  }
}

TEST_CASE("monotonicity scan: equality cases") {
  const ScanResult p = monotonicity_scan(VectorSystem(th::holder_A()), MatrixXd::Ones(1, 1), kSqrt,
                                         {ProfileSpec::box(0, 1, 1), ProfileSpec::box(0, 1, 1)}, default_time_grid());
  for (double v : p.trace.values) CHECK(std::abs(v - 1.0) <= 5e-10);

  YoungSetup y;
  std::vector<ProfileSpec> g;
  const VectorXd b = Eigen::Vector3d(0.7, 1.3, 2.0);
  for (int j = 0; j < 3; ++j) {
    g.push_back(ProfileSpec::gaussian(b[j] / std::sqrt(M_PI * y.sigma[j]), 0.0, y.sigma[j] / 2.0));
  }
  const ScanResult s = monotonicity_scan(y.sys, y.C, BellmanSpec::young(th::young_e()), g, default_time_grid());
  CHECK(s.verdict == "monotone");
  const auto [lo, hi] = std::minmax_element(s.trace.values.begin(), s.trace.values.end());
  CHECK(*hi - *lo <= 5e-10 * std::max(1.0, *hi));
  CHECK(std::abs(s.rhs - s.initial) <= 5e-10 * std::max(1.0, s.rhs));
}

TEST_CASE("monotonicity scan without a certificate") {
  VectorSystem sq(MatrixXd::Identity(2, 2));
  const ScanResult s = monotonicity_scan(sq, (MatrixXd(2, 2) << 1, 0.9, 0.9, 1).finished(), BellmanSpec::product(2),
                                         {ProfileSpec::box(0, 1, 1), ProfileSpec::box(0, 1, 1)}, {0, 1, 10});
  CHECK_FALSE(s.certified);
  CHECK(s.verdict == "no certificate");
  CHECK_THROWS_AS(monotonicity_scan(sq, MatrixXd::Identity(2, 2), BellmanSpec::product(2),
                                    {ProfileSpec::box(0, 1, 1), ProfileSpec::box(0, 1, 1)}, {1, 0}),
                  Error);
}

TEST_CASE("approach to the limit") {
  VectorSystem sys(th::holder_A());
  const MatrixXd one = MatrixXd::Ones(1, 1);
  const double rhs = rhs_limit(sys, one, kSqrt, Eigen::Vector2d(1, 2)).closed_form;
  double prev = INFINITY;
  for (double T : {10.0, 100.0, 1000.0}) {
    const double gap = std::abs(bellman_energy(sys, one, kSqrt, box_box(), T).value - rhs);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("bellman identity probe examples") {
  const ProbeResult a = bellman_identity_probe(VectorSystem(th::holder_A()), MatrixXd::Ones(1, 1), kSqrt, box_box(),
                                               1.0, VectorXd::Constant(1, 0.3));
  CHECK(a.pass);
  CHECK(a.defect <= 1e-4);
  // L3 makes the right side nonnegative: the energy grows
  CHECK(a.rhs > 0.0);

  const ProbeResult p = bellman_identity_probe(VectorSystem(MatrixXd::Identity(2, 2)), MatrixXd::Identity(2, 2),
                                               BellmanSpec::product(2),
                                               {ProfileSpec::box(0, 1, 1), ProfileSpec::gaussian(1, 0, 1)}, 0.5,
                                               Eigen::Vector2d(0.4, -0.2));
  CHECK(p.rhs == 0.0);
  CHECK(std::abs(p.lhs) <= 1e-4);
  CHECK(p.pass);

  const ProbeResult n = bellman_identity_probe(VectorSystem(th::nazarov_A()), th::nazarov_C(), th::nazarov_B(),
                                               {ProfileSpec::box(0, 1, 1), ProfileSpec::box(-1, 2, 0.5),
                                                ProfileSpec::box(0, 2, 1)},
                                               0.5, Eigen::Vector2d(0.8, 0.4));
  CHECK(n.pass);
  CHECK(n.defect <= 1e-4 * (1 + std::abs(n.rhs)));

  CHECK_THROWS_AS(bellman_identity_probe(VectorSystem(th::holder_A()), MatrixXd::Ones(1, 1), kSqrt, box_box(),
                                         5e-4, VectorXd::Constant(1, 0.3)),
                  Error);
}

}
