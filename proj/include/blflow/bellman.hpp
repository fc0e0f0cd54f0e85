#pragma once

#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

namespace blflow {

/// 1-homogeneous concave function phi(u, v) of two variables.
class Section {
 public:
  enum class Kind { Sqrt, WeightedGeometric };

  /// sqrt(u v); solves the homogeneous Monge-Ampere equation.
  static Section sqrt();
  /// u^theta v^(1-theta), 0 < theta < 1.
  static Section weighted_geometric(double theta);
  /// Parses "sqrt" or "geomean:<theta>". Throws Input on unknown ids.
  static Section from_id(std::string_view id);

  Kind kind() const { return kind_; }
  double theta() const { return theta_; }
  std::string id() const;

  double value(double u, double v) const;
  Eigen::Vector2d gradient(double u, double v) const;
  Eigen::Matrix2d hessian(double u, double v) const;

 private:
  Section(Kind kind, double theta) : kind_(kind), theta_(theta) {}

  Kind kind_;
  double theta_;
};

/// Symbolic Bellman function drawn from a closed catalog. Values extend
/// continuously to the closed orthant; derivatives exist on the interior
/// only and reject boundary points.
class BellmanSpec {
 public:
  enum class Variant { Young, Product, LiftedSection };

  /// B(y) = y_1^alpha_1 ... y_n^alpha_n with each alpha_j in (0, 1).
  static BellmanSpec young(Eigen::VectorXd alpha);
  /// B(y) = M y_1 ... y_n.
  static BellmanSpec product(int n, double M = 1.0);
  /// B(y) = M * prod_{j not in section} y_j^alpha_j * phi(y_s, y_{s+1}), where
  /// the section sits at coordinates (s, s+1). section_at < 0 means the last
  /// two coordinates.
  static BellmanSpec lifted(Section phi, Eigen::VectorXd alpha, double M = 1.0,
                            int section_at = -1);

  Variant variant() const { return variant_; }
  int arity() const { return n_; }
  /// Homogeneity degree.
  double degree() const;

  const Eigen::VectorXd& alpha() const { return alpha_; }
  double scale() const { return M_; }
  const Section& section() const { return section_; }
  int section_at() const { return section_at_; }

  /// Every catalog member is M * prod_j y_j^gamma_j; returns (M, gamma).
  /// Closed-form Gaussian integrals of B rely on this.
  std::pair<double, Eigen::VectorXd> monomial() const;

  double value(const Eigen::VectorXd& y) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& y) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& y) const;

 private:
  BellmanSpec(Variant variant, int n, Eigen::VectorXd alpha, double M,
              Section section, int section_at);

  void require_arity(const Eigen::VectorXd& y) const;
  void require_interior(const Eigen::VectorXd& y) const;
  // Maps a prefactor index to its coordinate for the lifted variant.
  int prefactor_coordinate(int i) const;

  Variant variant_;
  int n_;
  Eigen::VectorXd alpha_;
  double M_;
  Section section_;
  int section_at_;
};

std::string to_string(BellmanSpec::Variant v);

struct EulerCheck {
  double defect = 0.0;
  bool pass = false;
};

/// |<grad B(y), y> - k B(y)| and whether it is <= homog_tol (1 + |B(y)|).
EulerCheck euler_check(const BellmanSpec& B, const Eigen::VectorXd& y, double k,
                       double homog_tol = 1e-8);

/// Product lift y_1^alpha_1 ... y_m^alpha_m * phi(y_{m+1}, y_{m+2}).
BellmanSpec lift_section(std::string_view section_id, Eigen::VectorXd alpha,
                         double M = 1.0);

}  // namespace blflow
