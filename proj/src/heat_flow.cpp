#include "blflow/heat_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blflow/gaussian_constant.hpp"
#include "blflow/quadrature.hpp"
#include "blflow/verifier.hpp"

namespace blflow {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

// erf(a) - erf(b) for a >= b without cancellation in the tails.
double erf_diff(double a, double b) {
  if (b >= 0.0) return std::erfc(b) - std::erfc(a);
  if (a <= 0.0) return std::erfc(-a) - std::erfc(-b);
  return std::erf(a) - std::erf(b);
}

double box_heat(const ProfileSpec::Box& box, double sigma, double y, double t) {
  if (t == 0.0) return (y >= box.lo && y <= box.hi) ? box.height : 0.0;
  const double s = std::sqrt(4.0 * sigma * t);
  return std::max(0.0, 0.5 * box.height * erf_diff((box.hi - y) / s, (box.lo - y) / s));
}

double box_heat_dy(const ProfileSpec::Box& box, double sigma, double y, double t) {
  if (t == 0.0) return 0.0;
  const double s = std::sqrt(4.0 * sigma * t);
  const double zl = (box.lo - y) / s, zh = (box.hi - y) / s;
  return box.height / (kSqrtPi * s) * (std::exp(-zl * zl) - std::exp(-zh * zh));
}

void require_profiles(const VectorSystem& sys, const std::vector<ProfileSpec>& profiles) {
  if (static_cast<int>(profiles.size()) != sys.n()) {
    throw Error(ErrorKind::Structural, "need one profile per column of A");
  }
}

VectorXd positive_diffusivities(const VectorSystem& sys, const MatrixXd& C) {
  const VectorXd sigma = diffusivities(sys, C);
  if (!(sigma.minCoeff() > 0.0)) {
    throw Error(ErrorKind::CertificateRejected, "heat flow needs <C a_j, a_j> > 0 for all j");
  }
  return sigma;
}

CubeQuadOptions quad_options(int k, const EnergyOptions& opts) {
  CubeQuadOptions qo;
  qo.tol = opts.quad_tol;
  switch (k) {
    case 1: qo.initial_panels = 32; qo.max_levels = 12; break;
    case 2: qo.initial_panels = 16; qo.max_levels = 5; break;
    default: qo.initial_panels = 8; qo.max_levels = 2; break;
  }
  if (opts.initial_panels > 0) qo.initial_panels = opts.initial_panels;
  if (opts.max_levels >= 0) qo.max_levels = opts.max_levels;
  return qo;
}

// Half-width of the integration cube: grown until the Gaussian envelope of
// the integrand on the cube surface is below 1e-14 of its value at the origin.
double envelope_half_width(const VectorSystem& sys, const BellmanSpec& B,
                           const std::vector<Domination>& env) {
  const int k = sys.k(), n = sys.n();
  auto F = [&](const VectorXd& x) {
    VectorXd y(n);
    for (int j = 0; j < n; ++j) y[j] = env[j](sys.A().col(j).dot(x));
    return B.value(y);
  };
  const double F0 = F(VectorXd::Zero(k));
  const int m = k == 2 ? 65 : 17;
  double L = 1.0;
  for (int it = 0; it < 200; ++it) {
    double worst = 0.0;
    VectorXd x(k);
    if (k == 1) {
      x[0] = L;
      worst = std::max(F(x), F(-x));
    } else {
      for (int axis = 0; axis < k; ++axis) {
        for (double side : {-L, L}) {
          const int others = k - 1;
          const int total = others == 1 ? m : m * m;
          for (int idx = 0; idx < total; ++idx) {
            int r = idx, o = 0;
            for (int d = 0; d < k; ++d) {
              if (d == axis) {
                x[d] = side;
              } else {
                x[d] = -L + 2.0 * L * (r % m) / (m - 1);
                r /= m;
                ++o;
              }
            }
            worst = std::max(worst, F(x));
          }
        }
      }
    }
    if (worst <= 1e-14 * F0) return L;
    L *= 1.25;
  }
  throw Error(ErrorKind::NumericalAnomaly, "integrand envelope does not decay (L5 fails?)");
}

std::vector<std::vector<double>> axis_breakpoints(const VectorSystem& sys,
                                                  const std::vector<ProfileSpec>& profiles) {
  std::vector<std::vector<double>> br(sys.k());
  for (int j = 0; j < sys.n(); ++j) {
    const VectorXd a = sys.A().col(j);
    int nz = -1, count = 0;
    for (int i = 0; i < a.size(); ++i) {
      if (a[i] != 0.0) {
        nz = i;
        ++count;
      }
    }
    if (count != 1) continue;
    for (double p : profiles[j].breakpoints()) br[nz].push_back(p / a[nz]);
  }
  return br;
}

QuadMeta to_meta(const CubeQuadResult& q) {
  return {q.half_width, q.points_per_axis, q.refinement, q.converged};
}

}  // namespace

// ---- profiles ----------------------------------------------------------------

Domination Domination::at(double t, double sigma) const {
  const double g = 1.0 + 4.0 * t * delta * sigma;
  return {b / std::sqrt(g), delta / g};
}

double Domination::operator()(double y) const { return b * std::exp(-delta * y * y); }

std::string to_string(ProfileSpec::Kind k) {
  switch (k) {
    case ProfileSpec::Kind::Box: return "box";
    case ProfileSpec::Kind::Gaussian: return "gaussian";
    case ProfileSpec::Kind::SumOfBoxes: return "sum_of_boxes";
  }
  return "unknown";
}

ProfileSpec ProfileSpec::box(double lo, double hi, double height) {
  if (!(hi > lo) || !(height > 0.0)) {
    throw Error(ErrorKind::Input, "box profile needs lo < hi and height > 0");
  }
  ProfileSpec p;
  p.kind_ = Kind::Box;
  p.boxes_ = {{lo, hi, height}};
  p.compute_domination();
  return p;
}

ProfileSpec ProfileSpec::gaussian(double amplitude, double center, double variance) {
  if (!(amplitude > 0.0) || !(variance > 0.0) || !std::isfinite(center)) {
    throw Error(ErrorKind::Input, "gaussian profile needs amplitude > 0 and variance > 0");
  }
  ProfileSpec p;
  p.kind_ = Kind::Gaussian;
  p.amplitude_ = amplitude;
  p.center_ = center;
  p.variance_ = variance;
  p.compute_domination();
  return p;
}

ProfileSpec ProfileSpec::sum_of_boxes(std::vector<Box> boxes) {
  if (boxes.empty()) throw Error(ErrorKind::Input, "sum_of_boxes needs at least one box");
  for (const auto& b : boxes) {
    if (!(b.hi > b.lo) || !(b.height > 0.0)) {
      throw Error(ErrorKind::Input, "box profile needs lo < hi and height > 0");
    }
  }
  ProfileSpec p;
  p.kind_ = Kind::SumOfBoxes;
  p.boxes_ = std::move(boxes);
  p.compute_domination();
  return p;
}

void ProfileSpec::compute_domination() {
  if (kind_ == Kind::Gaussian) {
    if (center_ == 0.0) {
      dom_ = {amplitude_, 1.0 / (2.0 * variance_)};
    } else {
      // (y - c)^2 >= y^2 / 2 - c^2
      dom_ = {amplitude_ * std::exp(center_ * center_ / (2.0 * variance_)), 1.0 / (4.0 * variance_)};
    }
    return;
  }
  double M = 0.0, heights = 0.0;
  for (const auto& b : boxes_) {
    M = std::max({M, std::abs(b.lo), std::abs(b.hi)});
    heights += b.height;
  }
  const double delta = 1.0 / std::max(1.0, M * M);
  dom_ = {heights * std::exp(delta * M * M), delta};
}

double ProfileSpec::value(double y) const { return heat_extension(*this, 1.0, y, 0.0); }

double ProfileSpec::mass() const {
  if (kind_ == Kind::Gaussian) return amplitude_ * std::sqrt(2.0 * std::numbers::pi * variance_);
  double m = 0.0;
  for (const auto& b : boxes_) m += b.height * (b.hi - b.lo);
  return m;
}

std::vector<double> ProfileSpec::breakpoints() const {
  std::vector<double> br;
  for (const auto& b : boxes_) {
    br.push_back(b.lo);
    br.push_back(b.hi);
  }
  return br;
}

double heat_extension(const ProfileSpec& u, double sigma, double y, double t) {
  if (t < 0.0 || !(sigma > 0.0)) throw Error(ErrorKind::Domain, "heat extension needs t >= 0, sigma > 0");
  if (u.kind() == ProfileSpec::Kind::Gaussian) {
    const double v = u.variance() + 2.0 * sigma * t;
    const double d = y - u.center();
    return u.amplitude() * std::sqrt(u.variance() / v) * std::exp(-d * d / (2.0 * v));
  }
  double s = 0.0;
  for (const auto& b : u.boxes()) s += box_heat(b, sigma, y, t);
  return s;
}

double heat_extension_dy(const ProfileSpec& u, double sigma, double y, double t) {
  if (t < 0.0 || !(sigma > 0.0)) throw Error(ErrorKind::Domain, "heat extension needs t >= 0, sigma > 0");
  if (u.kind() == ProfileSpec::Kind::Gaussian) {
    const double v = u.variance() + 2.0 * sigma * t;
    return -(y - u.center()) / v * heat_extension(u, sigma, y, t);
  }
  double s = 0.0;
  for (const auto& b : u.boxes()) s += box_heat_dy(b, sigma, y, t);
  return s;
}

// ---- energy --------------------------------------------------------------------

EnergyValue bellman_energy(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                           const std::vector<ProfileSpec>& profiles, double t,
                           const EnergyOptions& opts) {
  if (sys.k() > 3) throw Error(ErrorKind::UnsupportedScale, "energy quadrature supports k <= 3");
  if (t < 0.0) throw Error(ErrorKind::Domain, "energy needs t >= 0");
  require_profiles(sys, profiles);
  const VectorXd sigma = positive_diffusivities(sys, C);
  const int n = sys.n();

  std::vector<Domination> env(n);
  for (int j = 0; j < n; ++j) env[j] = profiles[j].domination().at(t, sigma[j]);
  const double L = envelope_half_width(sys, B, env);

  CubeQuadOptions qo = quad_options(sys.k(), opts);
  qo.breakpoints = axis_breakpoints(sys, profiles);
  const MatrixXd At = sys.A().transpose();
  auto f = [&](const VectorXd& x) {
    const VectorXd s = At * x;
    VectorXd y(n);
    for (int j = 0; j < n; ++j) y[j] = heat_extension(profiles[j], sigma[j], s[j], t);
    return B.value(y);
  };
  const CubeQuadResult q = integrate_cube(f, sys.k(), L, qo);
  return {q.value, to_meta(q)};
}

double rhs_limit_closed_form(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                             const VectorXd& masses) {
  require_closed_form_self_test();
  const VectorXd sigma = positive_diffusivities(sys, C);
  const auto [M, gamma] = B.monomial();
  const int k = sys.k();
  double pref = M;
  MatrixXd Q = MatrixXd::Zero(k, k);
  for (int j = 0; j < sys.n(); ++j) {
    pref *= std::pow(masses[j] / std::sqrt(std::numbers::pi * sigma[j]), gamma[j]);
    Q += gamma[j] / sigma[j] * sys.A().col(j) * sys.A().col(j).transpose();
  }
  // integral of exp(-x^T Q x) = integral of exp(-pi x^T (Q/pi) x)
  return pref * gaussian_integral(Q / std::numbers::pi);
}

RhsValue rhs_limit(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                   const VectorXd& masses, const EnergyOptions& opts) {
  if (sys.k() > 3) throw Error(ErrorKind::UnsupportedScale, "energy quadrature supports k <= 3");
  if (masses.size() != sys.n() || !(masses.minCoeff() > 0.0)) {
    throw Error(ErrorKind::Domain, "rhs_limit needs n positive masses");
  }
  const VectorXd sigma = positive_diffusivities(sys, C);
  const int n = sys.n();
  std::vector<Domination> env(n);
  VectorXd c(n);
  for (int j = 0; j < n; ++j) {
    c[j] = masses[j] / std::sqrt(std::numbers::pi * sigma[j]);
    env[j] = {c[j], 1.0 / sigma[j]};
  }
  const double L = envelope_half_width(sys, B, env);
  const MatrixXd At = sys.A().transpose();
  auto f = [&](const VectorXd& x) {
    const VectorXd s = At * x;
    VectorXd y(n);
    for (int j = 0; j < n; ++j) y[j] = env[j](s[j]);
    return B.value(y);
  };
  const CubeQuadResult q = integrate_cube(f, sys.k(), L, quad_options(sys.k(), opts));
  RhsValue out;
  out.value = q.value;
  out.meta = to_meta(q);
  try {
    out.closed_form = rhs_limit_closed_form(sys, C, B, masses);
    out.has_closed_form = true;
  } catch (const Error&) {
    out.has_closed_form = false;
  }
  return out;
}

std::vector<double> default_time_grid(double tmax, int points) {
  if (!(tmax > 0.0)) throw Error(ErrorKind::Input, "tmax must be positive");
  std::vector<double> grid{0.0};
  const double t0 = std::min(1e-2, tmax);
  if (points > 0) {
    for (int i = 0; i < points; ++i) {
      const double f = points == 1 ? 1.0 : static_cast<double>(i) / (points - 1);
      grid.push_back(t0 * std::pow(tmax / t0, f));
    }
  } else {
    for (int m = -2; std::pow(10.0, m) < tmax * (1.0 - 1e-12); ++m) grid.push_back(std::pow(10.0, m));
    grid.push_back(tmax);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

ScanResult monotonicity_scan(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                             const std::vector<ProfileSpec>& profiles,
                             const std::vector<double>& times, const EnergyOptions& opts) {
  if (times.empty()) throw Error(ErrorKind::Input, "empty time grid");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw Error(ErrorKind::Input, "time grid must be strictly increasing");
  }
  require_profiles(sys, profiles);
  ScanResult res;
  res.certified = check_L3(sys, C, B, Sampler{}).pass;
  res.quadrature_ok = true;
  for (double t : times) {
    const EnergyValue ev = bellman_energy(sys, C, B, profiles, t, opts);
    res.trace.times.push_back(t);
    res.trace.values.push_back(ev.value);
    res.trace.quad_meta.push_back(ev.meta);
    res.quadrature_ok = res.quadrature_ok && ev.meta.converged;
  }
  const auto& v = res.trace.values;
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  res.mono_tol = std::max(1e-8, 10.0 * opts.quad_tol * vmax);
  res.max_drop = 0.0;
  double running_max = v.front();
  for (std::size_t i = 1; i < v.size(); ++i) {
    res.max_drop = std::max(res.max_drop, running_max - v[i]);
    running_max = std::max(running_max, v[i]);
  }
  res.monotone = res.max_drop <= res.mono_tol;

  res.initial = times.front() == 0.0 ? v.front() : bellman_energy(sys, C, B, profiles, 0.0, opts).value;
  VectorXd masses(sys.n());
  for (int j = 0; j < sys.n(); ++j) masses[j] = profiles[j].mass();
  const RhsValue rhs = rhs_limit(sys, C, B, masses, opts);
  res.rhs = rhs.has_closed_form ? rhs.closed_form : rhs.value;
  res.final_gap = res.rhs - v.back();
  res.max_excess = -INFINITY;
  for (double x : v) res.max_excess = std::max(res.max_excess, x - res.rhs);

  if (!res.quadrature_ok) {
    res.verdict = "anomaly";
  } else if (!res.certified) {
    res.verdict = "no certificate";
  } else {
    res.verdict = (res.monotone && res.max_excess <= res.mono_tol) ? "monotone" : "violated";
  }
  return res;
}

ProbeResult bellman_identity_probe(const VectorSystem& sys, const MatrixXd& C, const BellmanSpec& B,
                                   const std::vector<ProfileSpec>& profiles, double t,
                                   const VectorXd& x, const ProbeSteps& steps) {
  if (t < 10.0 * steps.h_t) throw Error(ErrorKind::Domain, "probe needs t >= 10 h_t");
  require_profiles(sys, profiles);
  const VectorXd sigma = positive_diffusivities(sys, C);
  const int k = sys.k(), n = sys.n();
  const MatrixXd At = sys.A().transpose();

  auto F = [&](const VectorXd& p, double tt) {
    const VectorXd s = At * p;
    VectorXd y(n);
    for (int j = 0; j < n; ++j) y[j] = heat_extension(profiles[j], sigma[j], s[j], tt);
    return B.value(y);
  };

  const double ht = steps.h_t, h = steps.h_x;
  const double dt = (F(x, t + ht) - F(x, t - ht)) / (2.0 * ht);
  const double f0 = F(x, t);
  double lap = 0.0;
  for (int i = 0; i < k; ++i) {
    VectorXd e_i = VectorXd::Zero(k);
    e_i[i] = h;
    const double dii = (F(x + e_i, t) - 2.0 * f0 + F(x - e_i, t)) / (h * h);
    lap += C(i, i) * dii;
    for (int j = i + 1; j < k; ++j) {
      VectorXd e_j = VectorXd::Zero(k);
      e_j[j] = h;
      const double dij = (F(x + e_i + e_j, t) - F(x + e_i - e_j, t) - F(x - e_i + e_j, t) +
                          F(x - e_i - e_j, t)) / (4.0 * h * h);
      lap += (C(i, j) + C(j, i)) * dij;
    }
  }

  const VectorXd s = At * x;
  VectorXd u(n), du(n);
  for (int j = 0; j < n; ++j) {
    u[j] = heat_extension(profiles[j], sigma[j], s[j], t);
    du[j] = heat_extension_dy(profiles[j], sigma[j], s[j], t);
  }
  const MatrixXd G = At * C * sys.A();
  ProbeResult res;
  res.lhs = dt - lap;
  res.rhs = -du.dot(G.cwiseProduct(B.hessian(u)) * du);
  res.defect = std::abs(res.lhs - res.rhs);
  res.pass = res.defect <= 1e-4 * (1.0 + std::abs(res.rhs));
  return res;
}

}  // namespace blflow
