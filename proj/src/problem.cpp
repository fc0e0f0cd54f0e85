#include "blflow/problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace blflow {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::Input, msg); }

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) bad(std::string("missing field '") + name + "'");
  return *it;
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) bad(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(what + " must be finite");
  return v;
}

int integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) bad(what + " must be an integer");
  return j.get<int>();
}

VectorXd vector(const json& j, const std::string& what) {
  if (!j.is_array()) bad(what + " must be an array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = number(j[i], what);
  return v;
}

MatrixXd matrix(const json& j, int rows, int cols, const std::string& what) {
  if (!j.is_array()) bad(what + " must be an array");
  MatrixXd M(rows, cols);
  if (!j.empty() && j[0].is_array()) {
    if (static_cast<int>(j.size()) != rows) bad(what + " has the wrong number of rows");
    for (int r = 0; r < rows; ++r) {
      if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols) bad(what + " has a ragged row");
      for (int c = 0; c < cols; ++c) M(r, c) = number(j[r][c], what);
    }
    return M;
  }
  if (static_cast<int>(j.size()) != rows * cols) {
    bad(what + " needs " + std::to_string(rows * cols) + " entries");
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) M(r, c) = number(j[r * cols + c], what);
  }
  return M;
}

json flat(const MatrixXd& M) {
  json out = json::array();
  for (int r = 0; r < M.rows(); ++r) {
    for (int c = 0; c < M.cols(); ++c) out.push_back(M(r, c));
  }
  return out;
}

json array(const VectorXd& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

BellmanSpec parse_bellman(const json& j, int n) {
  if (!j.is_object()) bad("B must be an object");
  const json& variant = field(j, "variant");
  if (!variant.is_string()) bad("B.variant must be a string");
  const std::string v = variant.get<std::string>();
  const double M = j.contains("M") ? number(j["M"], "B.M") : 1.0;
  BellmanSpec B = [&] {
    if (v == "young") {
      if (j.contains("M")) bad("B.M is not a parameter of young");
      return BellmanSpec::young(vector(field(j, "alpha"), "B.alpha"));
    }
    if (v == "product") return BellmanSpec::product(n, M);
    if (v == "lifted") {
      const json& s = field(j, "section");
      if (!s.is_string()) bad("B.section must be a string");
      const int at = j.contains("section_at") ? integer(j["section_at"], "B.section_at") : -1;
      return BellmanSpec::lifted(Section::from_id(s.get<std::string>()),
                                 vector(field(j, "alpha"), "B.alpha"), M, at);
    }
    bad("unknown B.variant '" + v + "'");
  }();
  if (B.arity() != n) bad("B takes " + std::to_string(B.arity()) + " arguments but n = " + std::to_string(n));
  return B;
}

json dump_bellman(const BellmanSpec& B) {
  json j;
  j["variant"] = to_string(B.variant());
  switch (B.variant()) {
    case BellmanSpec::Variant::Young:
      j["alpha"] = array(B.alpha());
      break;
    case BellmanSpec::Variant::Product:
      j["M"] = B.scale();
      break;
    case BellmanSpec::Variant::LiftedSection:
      j["alpha"] = array(B.alpha());
      j["M"] = B.scale();
      j["section"] = B.section().id();
      j["section_at"] = B.section_at();
      break;
  }
  return j;
}

ProfileSpec::Box parse_box(const json& j, const std::string& what) {
  if (!j.is_object()) bad(what + " must be an object");
  return {number(field(j, "lo"), what + ".lo"), number(field(j, "hi"), what + ".hi"),
          number(field(j, "height"), what + ".height")};
}

ProfileSpec parse_profile(const json& j, int idx) {
  const std::string what = "profiles[" + std::to_string(idx) + "]";
  if (!j.is_object()) bad(what + " must be an object");
  const json& type = field(j, "type");
  if (!type.is_string()) bad(what + ".type must be a string");
  const std::string t = type.get<std::string>();
  if (t == "box") {
    const auto b = parse_box(j, what);
    return ProfileSpec::box(b.lo, b.hi, b.height);
  }
  if (t == "gaussian") {
    return ProfileSpec::gaussian(number(field(j, "amplitude"), what + ".amplitude"),
                                 number(field(j, "center"), what + ".center"),
                                 number(field(j, "variance"), what + ".variance"));
  }
  if (t == "sum_of_boxes") {
    const json& boxes = field(j, "boxes");
    if (!boxes.is_array()) bad(what + ".boxes must be an array");
    std::vector<ProfileSpec::Box> list;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      list.push_back(parse_box(boxes[i], what + ".boxes[" + std::to_string(i) + "]"));
    }
    return ProfileSpec::sum_of_boxes(std::move(list));
  }
  bad("unknown profile type '" + t + "'");
}

json dump_box(const ProfileSpec::Box& b) { return {{"lo", b.lo}, {"hi", b.hi}, {"height", b.height}}; }

json dump_profile(const ProfileSpec& p) {
  json j;
  j["type"] = to_string(p.kind());
  switch (p.kind()) {
    case ProfileSpec::Kind::Box:
      j.update(dump_box(p.boxes().front()));
      break;
    case ProfileSpec::Kind::Gaussian:
      j["amplitude"] = p.amplitude();
      j["center"] = p.center();
      j["variance"] = p.variance();
      break;
    case ProfileSpec::Kind::SumOfBoxes:
      j["boxes"] = json::array();
      for (const auto& b : p.boxes()) j["boxes"].push_back(dump_box(b));
      break;
  }
  return j;
}

}  // namespace

void set_tolerance(Tolerances& tol, const std::string& name, double value) {
  const std::map<std::string, double Tolerances::*> reals = {
      {"rank_tol", &Tolerances::rank_tol},         {"fd_tol", &Tolerances::fd_tol},
      {"homog_tol", &Tolerances::homog_tol},       {"basis_tol", &Tolerances::basis_tol},
      {"boundary_tol", &Tolerances::boundary_tol}, {"res_tol", &Tolerances::res_tol},
      {"findc_tol", &Tolerances::findc_tol},       {"projection_tol", &Tolerances::projection_tol},
      {"psd_tol", &Tolerances::psd_tol},           {"pde_tol", &Tolerances::pde_tol},
      {"quad_tol", &Tolerances::quad_tol},         {"damping", &Tolerances::damping},
  };
  if (auto it = reals.find(name); it != reals.end()) {
    if (!(value > 0.0)) bad("tolerance '" + name + "' must be positive");
    tol.*(it->second) = value;
    return;
  }
  if (name == "max_iter" || name == "samples") {
    if (!(value >= 1.0) || value != std::floor(value) || value > 1e9) {
      bad("tolerance '" + name + "' must be a positive integer");
    }
    (name == "max_iter" ? tol.max_iter : tol.samples) = static_cast<int>(value);
    return;
  }
  bad("unknown tolerance '" + name + "'");
}

Problem parse_problem(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) bad("problem file must be a JSON object");
  static const char* known[] = {"k", "n", "A", "inv_p", "B", "profiles", "C", "seed", "tolerances"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* key : known) ok = ok || it.key() == key;
    if (!ok) bad("unknown field '" + it.key() + "'");
  }

  const int k = integer(field(j, "k"), "k");
  const int n = integer(field(j, "n"), "n");
  if (k < 1 || n < 1) bad("k and n must be positive");
  Problem p{VectorSystem(matrix(field(j, "A"), k, n, "A")), {}, {}, {}, {}, 0, {}, {}};

  if (j.contains("inv_p")) {
    VectorXd inv_p = vector(j["inv_p"], "inv_p");
    if (inv_p.size() != n) bad("inv_p needs n entries");
    p.exponents.emplace(std::move(inv_p));
  }
  if (j.contains("B")) p.bellman.emplace(parse_bellman(j["B"], n));
  if (j.contains("profiles")) {
    const json& prof = j["profiles"];
    if (!prof.is_array() || static_cast<int>(prof.size()) != n) bad("profiles needs n entries");
    for (int i = 0; i < n; ++i) p.profiles.push_back(parse_profile(prof[i], i));
  }
  if (j.contains("C")) {
    MatrixXd C = matrix(j["C"], k, k, "C");
    certificate_from_matrix(p.sys, C);
    p.C = std::move(C);
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) bad("seed must be a non-negative integer");
    p.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (!t.is_object()) bad("tolerances must be an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      const double v = number(it.value(), "tolerances." + it.key());
      set_tolerance(p.tol, it.key(), v);
      p.tol_overrides[it.key()] = v;
    }
  }
  return p;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::string serialize_problem(const Problem& p) {
  json j;
  j["k"] = p.sys.k();
  j["n"] = p.sys.n();
  j["A"] = flat(p.sys.A());
  if (p.exponents) j["inv_p"] = array(p.exponents->inv_p());
  if (p.bellman) j["B"] = dump_bellman(*p.bellman);
  if (!p.profiles.empty()) {
    j["profiles"] = json::array();
    for (const auto& prof : p.profiles) j["profiles"].push_back(dump_profile(prof));
  }
  if (p.C) j["C"] = flat(*p.C);
  j["seed"] = p.seed;
  if (!p.tol_overrides.empty()) j["tolerances"] = p.tol_overrides;
  return j.dump(2) + "\n";
}

}  // namespace blflow
