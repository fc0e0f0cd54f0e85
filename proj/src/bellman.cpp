#include "blflow/bellman.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "blflow/error.hpp"

namespace blflow {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---- Section ---------------------------------------------------------------

Section Section::sqrt() { return Section(Kind::Sqrt, 0.5); }

Section Section::weighted_geometric(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw Error(ErrorKind::Input, "geomean section needs 0 < theta < 1");
  }
  return Section(Kind::WeightedGeometric, theta);
}

Section Section::from_id(std::string_view id) {
  if (id == "sqrt") return sqrt();
  constexpr std::string_view prefix = "geomean:";
  if (id.substr(0, prefix.size()) == prefix) {
    std::string rest(id.substr(prefix.size()));
    char* end = nullptr;
    const double theta = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str() || *end != '\0') {
      throw Error(ErrorKind::Input, "malformed section id '" + std::string(id) + "'");
    }
    return weighted_geometric(theta);
  }
  throw Error(ErrorKind::Input, "unknown section '" + std::string(id) + "'");
}

std::string Section::id() const {
  if (kind_ == Kind::Sqrt) return "sqrt";
  std::ostringstream os;
  os.precision(17);
  os << "geomean:" << theta_;
  return os.str();
}

double Section::value(double u, double v) const {
  if (kind_ == Kind::Sqrt) return std::sqrt(u * v);
  return std::pow(u, theta_) * std::pow(v, 1.0 - theta_);
}

Eigen::Vector2d Section::gradient(double u, double v) const {
  const double phi = value(u, v);
  const double a = theta_, b = 1.0 - theta_;
  return {phi * a / u, phi * b / v};
}

Eigen::Matrix2d Section::hessian(double u, double v) const {
  const double phi = value(u, v);
  const double a = theta_, b = 1.0 - theta_;
  Eigen::Matrix2d H;
  H(0, 0) = phi * a * (a - 1.0) / (u * u);
  H(1, 1) = phi * b * (b - 1.0) / (v * v);
  H(0, 1) = H(1, 0) = phi * a * b / (u * v);
  return H;
}

// ---- BellmanSpec -----------------------------------------------------------

std::string to_string(BellmanSpec::Variant v) {
  switch (v) {
    case BellmanSpec::Variant::Young: return "young";
    case BellmanSpec::Variant::Product: return "product";
    case BellmanSpec::Variant::LiftedSection: return "lifted";
  }
  return "unknown";
}

BellmanSpec::BellmanSpec(Variant variant, int n, VectorXd alpha, double M,
                         Section section, int section_at)
    : variant_(variant), n_(n), alpha_(std::move(alpha)), M_(M),
      section_(section), section_at_(section_at) {}

BellmanSpec BellmanSpec::young(VectorXd alpha) {
  if (alpha.size() < 1) throw Error(ErrorKind::Input, "young: empty exponent vector");
  for (int j = 0; j < alpha.size(); ++j) {
    if (!(alpha[j] > 0.0 && alpha[j] < 1.0)) {
      throw Error(ErrorKind::Input, "young: each exponent must lie in (0, 1)");
    }
  }
  const int n = static_cast<int>(alpha.size());
  return BellmanSpec(Variant::Young, n, std::move(alpha), 1.0, Section::sqrt(), -1);
}

BellmanSpec BellmanSpec::product(int n, double M) {
  if (n < 1) throw Error(ErrorKind::Input, "product: n must be positive");
  if (!(M > 0.0)) throw Error(ErrorKind::Input, "product: M must be positive");
  return BellmanSpec(Variant::Product, n, VectorXd::Ones(n), M, Section::sqrt(), -1);
}

BellmanSpec BellmanSpec::lifted(Section phi, VectorXd alpha, double M, int section_at) {
  if (!(M > 0.0)) throw Error(ErrorKind::Input, "lifted: M must be positive");
  for (int j = 0; j < alpha.size(); ++j) {
    if (!(alpha[j] > 0.0 && alpha[j] <= 1.0)) {
      throw Error(ErrorKind::Input, "lifted: prefactor exponents must lie in (0, 1]");
    }
  }
  const int n = static_cast<int>(alpha.size()) + 2;
  if (section_at < 0) section_at = n - 2;
  if (section_at > n - 2) throw Error(ErrorKind::Input, "lifted: section_at out of range");
  return BellmanSpec(Variant::LiftedSection, n, std::move(alpha), M, phi, section_at);
}

double BellmanSpec::degree() const {
  switch (variant_) {
    case Variant::Young: return alpha_.sum();
    case Variant::Product: return n_;
    case Variant::LiftedSection: return alpha_.sum() + 1.0;
  }
  return 0.0;
}

std::pair<double, VectorXd> BellmanSpec::monomial() const {
  switch (variant_) {
    case Variant::Young: return {1.0, alpha_};
    case Variant::Product: return {M_, VectorXd::Ones(n_)};
    case Variant::LiftedSection: {
      VectorXd gamma(n_);
      for (int i = 0; i < alpha_.size(); ++i) gamma[prefactor_coordinate(i)] = alpha_[i];
      gamma[section_at_] = section_.theta();
      gamma[section_at_ + 1] = 1.0 - section_.theta();
      return {M_, gamma};
    }
  }
  return {0.0, VectorXd()};
}

int BellmanSpec::prefactor_coordinate(int i) const {
  return i < section_at_ ? i : i + 2;
}

void BellmanSpec::require_arity(const VectorXd& y) const {
  if (y.size() != n_) {
    throw Error(ErrorKind::Structural, "Bellman function evaluated with wrong arity");
  }
}

void BellmanSpec::require_interior(const VectorXd& y) const {
  require_arity(y);
  for (int j = 0; j < n_; ++j) {
    if (!(y[j] > 0.0)) {
      throw Error(ErrorKind::Domain, "derivatives need y in the open orthant");
    }
  }
}

double BellmanSpec::value(const VectorXd& y) const {
  require_arity(y);
  for (int j = 0; j < n_; ++j) {
    if (!(y[j] >= 0.0)) throw Error(ErrorKind::Domain, "B is defined on y >= 0 only");
  }
  switch (variant_) {
    case Variant::Young: {
      double v = 1.0;
      for (int j = 0; j < n_; ++j) v *= std::pow(y[j], alpha_[j]);
      return v;
    }
    case Variant::Product:
      return M_ * y.prod();
    case Variant::LiftedSection: {
      double v = M_ * section_.value(y[section_at_], y[section_at_ + 1]);
      for (int i = 0; i < alpha_.size(); ++i) {
        v *= std::pow(y[prefactor_coordinate(i)], alpha_[i]);
      }
      return v;
    }
  }
  return 0.0;
}

VectorXd BellmanSpec::gradient(const VectorXd& y) const {
  require_interior(y);
  VectorXd g(n_);
  switch (variant_) {
    case Variant::Young: {
      const double B = value(y);
      for (int j = 0; j < n_; ++j) g[j] = B * alpha_[j] / y[j];
      break;
    }
    case Variant::Product: {
      for (int j = 0; j < n_; ++j) {
        double v = M_;
        for (int l = 0; l < n_; ++l) {
          if (l != j) v *= y[l];
        }
        g[j] = v;
      }
      break;
    }
    case Variant::LiftedSection: {
      const int s = section_at_;
      double pre = M_;
      for (int i = 0; i < alpha_.size(); ++i) {
        pre *= std::pow(y[prefactor_coordinate(i)], alpha_[i]);
      }
      const double phi = section_.value(y[s], y[s + 1]);
      const Eigen::Vector2d dphi = section_.gradient(y[s], y[s + 1]);
      for (int i = 0; i < alpha_.size(); ++i) {
        const int j = prefactor_coordinate(i);
        g[j] = pre * phi * alpha_[i] / y[j];
      }
      g[s] = pre * dphi[0];
      g[s + 1] = pre * dphi[1];
      break;
    }
  }
  return g;
}

MatrixXd BellmanSpec::hessian(const VectorXd& y) const {
  require_interior(y);
  MatrixXd H = MatrixXd::Zero(n_, n_);
  switch (variant_) {
    case Variant::Young: {
      // Hess B = B {alpha_i alpha_j / (y_i y_j)} - B {delta_ij alpha_j / y_j^2}
      const double B = value(y);
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
          H(i, j) = B * alpha_[i] * alpha_[j] / (y[i] * y[j]);
        }
        H(i, i) -= B * alpha_[i] / (y[i] * y[i]);
      }
      break;
    }
    case Variant::Product: {
      for (int i = 0; i < n_; ++i) {
        for (int j = i + 1; j < n_; ++j) {
          double v = M_;
          for (int l = 0; l < n_; ++l) {
            if (l != i && l != j) v *= y[l];
          }
          H(i, j) = H(j, i) = v;
        }
      }
      break;
    }
    case Variant::LiftedSection: {
      // B = P(y') phi(u, v); product rule over the two factor groups.
      const int s = section_at_;
      const int m = static_cast<int>(alpha_.size());
      double P = M_;
      for (int i = 0; i < m; ++i) P *= std::pow(y[prefactor_coordinate(i)], alpha_[i]);
      const double phi = section_.value(y[s], y[s + 1]);
      const Eigen::Vector2d dphi = section_.gradient(y[s], y[s + 1]);
      const Eigen::Matrix2d hphi = section_.hessian(y[s], y[s + 1]);
      for (int a = 0; a < m; ++a) {
        const int i = prefactor_coordinate(a);
        const double dPi = P * alpha_[a] / y[i];
        for (int b = 0; b < m; ++b) {
          const int j = prefactor_coordinate(b);
          H(i, j) = P * alpha_[a] * alpha_[b] / (y[i] * y[j]) * phi;
        }
        H(i, i) -= P * alpha_[a] / (y[i] * y[i]) * phi;
        for (int c = 0; c < 2; ++c) {
          H(i, s + c) = H(s + c, i) = dPi * dphi[c];
        }
      }
      for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < 2; ++d) H(s + c, s + d) = P * hphi(c, d);
      }
      break;
    }
  }
  return H;
}

EulerCheck euler_check(const BellmanSpec& B, const VectorXd& y, double k,
                       double homog_tol) {
  for (int j = 0; j < y.size(); ++j) {
    if (!(y[j] > 0.0)) throw Error(ErrorKind::Domain, "euler_check needs y_j > 0");
  }
  const double b = B.value(y);
  EulerCheck out;
  out.defect = std::abs(B.gradient(y).dot(y) - k * b);
  out.pass = out.defect <= homog_tol * (1.0 + std::abs(b));
  return out;
}

BellmanSpec lift_section(std::string_view section_id, VectorXd alpha, double M) {
  return BellmanSpec::lifted(Section::from_id(section_id), std::move(alpha), M);
}

}  // namespace blflow
