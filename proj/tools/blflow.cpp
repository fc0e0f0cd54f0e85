// blflow: command line front end for the library.
//
//   blflow finiteness|constant|solve-c|verify|flow <file>
//          [--tol X] [--grid N] [--tmax T] [--out path] [--format json|csv]
//
// Exit codes: 0 pass, 1 verdict fail, 2 input error, 3 non-convergence,
// 4 certificate rejection.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "blflow/bellman_matrix.hpp"
#include "blflow/gaussian_constant.hpp"
#include "blflow/heat_flow.hpp"
#include "blflow/polytope.hpp"
#include "blflow/problem.hpp"
#include "blflow/verifier.hpp"

using namespace blflow;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kFail = 1, kInput = 2, kNonConvergence = 3, kRejected = 4 };

struct Options {
  std::string file;
  std::optional<double> tol;
  int grid = 0;
  double tmax = 1e3;
  std::string out;
  std::string format = "json";
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergence:
    case ErrorKind::NumericalAnomaly: return kNonConvergence;
    case ErrorKind::CertificateRejected: return kRejected;
    default: return kInput;
  }
}

json array(const VectorXd& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

json rows(const MatrixXd& M) {
  json out = json::array();
  for (int r = 0; r < M.rows(); ++r) out.push_back(array(M.row(r).transpose()));
  return out;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw Error(ErrorKind::Input, "cannot write '" + o.out + "'");
  f << text;
}

void emit_json(const Options& o, const json& j) { emit(o, j.dump(2) + "\n"); }

const Exponents& need_exponents(const Problem& p) {
  if (!p.exponents) throw Error(ErrorKind::Input, "problem file has no inv_p");
  return *p.exponents;
}

const BellmanSpec& need_bellman(const Problem& p) {
  if (!p.bellman) throw Error(ErrorKind::Input, "problem file has no B");
  return *p.bellman;
}

json projection_json(const ProjectionReport& r) {
  return {{"eigenvalues", array(r.eigenvalues)}, {"idempotency", r.idempotency},
          {"asymmetry", r.asymmetry},            {"eig_distance", r.eig_distance},
          {"rank", r.rank},                      {"trace", r.trace},
          {"diag_bound_max_eig", r.diag_bound_max_eig}, {"pass", r.pass}};
}

// C from the file, else the solved Young certificate, else (A A^T)^-1 for a
// product function with k = n.
MatrixXd choose_C(const Problem& p, json& report) {
  if (p.C) {
    report["C_source"] = "file";
    return *p.C;
  }
  const BellmanSpec& B = need_bellman(p);
  if (B.variant() == BellmanSpec::Variant::Young) {
    const Exponents e = p.exponents ? *p.exponents : Exponents(B.alpha());
    const CertificateRun run = solve_certificate(p.sys, e, p.tol);
    if (!run.solve.converged) {
      throw Error(ErrorKind::NonConvergence, "s-system did not converge (residual " +
                                                 std::to_string(run.solve.residual) + ")");
    }
    report["C_source"] = "s-system";
    return run.cert.C;
  }
  if (B.variant() == BellmanSpec::Variant::Product && p.sys.k() == p.sys.n()) {
    report["C_source"] = "inverse gram";
    const MatrixXd& A = p.sys.A();
    return (A * A.transpose()).inverse();
  }
  throw Error(ErrorKind::Input, "problem file has no C and none can be derived for this B");
}

int cmd_finiteness(const Problem& p, const Options& o) {
  const double tol = o.tol.value_or(p.tol.boundary_tol);
  const BasisIndicatorSet bases = enumerate_bases(p.sys, p.tol.basis_tol);
  const FinitenessVerdict v = is_finite(bases, need_exponents(p), tol);
  json j;
  j["verdict"] = to_string(v.verdict);
  j["basis_count"] = v.basis_count;
  j["slack"] = v.slack;
  j["weights"] = array(v.weights);
  j["bases"] = bases.subsets;
  emit_json(o, j);
  return v.verdict == Membership::Outside ? kFail : kPass;
}

int cmd_constant(const Problem& p, const Options& o) {
  MaximizeOptions mo;
  mo.seed = p.seed;
  if (o.tol) mo.grad_tol = *o.tol;
  const DResult r = maximize_D(p.sys, need_exponents(p), mo);
  json j;
  j["D"] = r.D;
  j["argmax_b"] = array(r.argmax_b);
  j["restarts"] = r.restarts;
  j["iterations"] = r.iterations;
  j["grad_norm"] = r.grad_norm;
  j["status"] = to_string(r.status);
  j["membership"] = to_string(r.membership);
  j["warnings"] = r.warnings;
  json maxima = json::array();
  for (const auto& m : r.local_maxima) maxima.push_back({{"value", m.value}, {"b", array(m.b)}});
  j["local_maxima"] = maxima;
  emit_json(o, j);
  switch (r.status) {
    case SupStatus::Converged: return kPass;
    case SupStatus::Unbounded: return kFail;
    default: return kNonConvergence;
  }
}

int cmd_solve_c(const Problem& p, const Options& o) {
  Tolerances tol = p.tol;
  if (o.tol) tol.res_tol = *o.tol;
  const CertificateRun run = solve_certificate(p.sys, need_exponents(p), tol);
  json j;
  j["converged"] = run.solve.converged;
  j["iterations"] = run.solve.iterations;
  j["residual"] = run.solve.residual;
  j["s_sq"] = array(run.solve.s_sq);
  if (run.built) {
    j["C"] = rows(run.cert.C);
    j["sigma"] = array(run.cert.sigma);
    j["findC_defect"] = run.findC_defect;
    j["projection"] = projection_json(run.projection);
    if (p.sys.k() == p.sys.n()) {
      const MatrixXd& A = p.sys.A();
      const MatrixXd G = (A * A.transpose()).inverse();
      const double lambda = (run.cert.C.array() * G.array()).sum() / G.squaredNorm();
      j["gauge"] = lambda;
      j["gauge_residual"] = (run.cert.C - lambda * G).norm() / run.cert.C.norm();
    }
  }
  j["warnings"] = run.cert.warnings;
  emit_json(o, j);
  if (!run.solve.converged) return kNonConvergence;
  if (!run.built) return kRejected;
  const bool ok = run.findC_defect <= tol.findc_tol && run.projection.pass;
  return ok ? kPass : kFail;
}

int cmd_verify(const Problem& p, const Options& o) {
  json j;
  const MatrixXd C = choose_C(p, j);
  const BellmanSpec& B = need_bellman(p);
  Tolerances tol = p.tol;
  if (o.tol) tol.psd_tol = *o.tol;
  Sampler sampler;
  sampler.count = tol.samples;
  sampler.seed = p.seed;
  const VerifierReport r = verify(p.sys, C, B, sampler, tol);
  j["C"] = rows(C);
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["L3"] = {{"pass", r.l3.pass},
             {"sigma_positive", r.l3.sigma_positive},
             {"worst_max_eig", r.l3.worst_max_eig},
             {"worst_point", array(r.l3.worst_point)},
             {"separately_concave", r.l3.separately_concave}};
  j["pde"] = {{"pass", r.pde.pass},
              {"worst_defect", r.pde.worst_defect},
              {"worst_raw_defect", r.pde.worst_raw_defect},
              {"worst_point", array(r.pde.worst_point)}};
  j["rank"] = {{"pass", r.rank.pass},
               {"worst_rank", r.rank.worst_rank},
               {"bound", r.rank.bound},
               {"histogram", r.rank.histogram}};
  j["euler"] = {{"pass", r.euler_pass}, {"defect", r.euler_defect}};
  j["L5"] = {{"converged", r.l5.converged},
             {"anomaly", r.l5.anomaly},
             {"value", r.l5.value},
             {"half_widths", r.l5.half_widths},
             {"values", r.l5.values}};
  j["pass"] = r.pass();
  emit_json(o, j);
  return r.pass() ? kPass : kFail;
}

int cmd_flow(const Problem& p, const Options& o) {
  if (p.profiles.empty()) throw Error(ErrorKind::Input, "problem file has no profiles");
  json j;
  const MatrixXd C = choose_C(p, j);
  EnergyOptions eo;
  eo.quad_tol = o.tol.value_or(p.tol.quad_tol);
  const std::vector<double> times = default_time_grid(o.tmax, o.grid);
  const ScanResult s = monotonicity_scan(p.sys, C, need_bellman(p), p.profiles, times, eo);

  j["verdict"] = s.verdict;
  j["certified"] = s.certified;
  j["monotone"] = s.monotone;
  j["quadrature_ok"] = s.quadrature_ok;
  j["max_drop"] = s.max_drop;
  j["mono_tol"] = s.mono_tol;
  j["initial"] = s.initial;
  j["rhs"] = s.rhs;
  j["final"] = s.trace.values.back();
  j["final_gap"] = s.final_gap;
  j["max_excess"] = s.max_excess;

  if (o.format == "csv") {
    std::ostringstream csv;
    csv << std::setprecision(17) << "t,B_t,L,refinement\n";
    for (std::size_t i = 0; i < s.trace.times.size(); ++i) {
      csv << s.trace.times[i] << ',' << s.trace.values[i] << ',' << s.trace.quad_meta[i].half_width
          << ',' << s.trace.quad_meta[i].refinement << '\n';
    }
    emit(o, csv.str());
    (o.out.empty() ? std::cerr : std::cout) << j.dump(2) << "\n";
  } else {
    json trace = json::array();
    for (std::size_t i = 0; i < s.trace.times.size(); ++i) {
      const QuadMeta& m = s.trace.quad_meta[i];
      trace.push_back({{"t", s.trace.times[i]},
                       {"B_t", s.trace.values[i]},
                       {"L", m.half_width},
                       {"points_per_axis", m.points_per_axis},
                       {"refinement", m.refinement},
                       {"converged", m.converged}});
    }
    j["trace"] = trace;
    emit_json(o, j);
  }
  if (s.verdict == "monotone") return kPass;
  if (s.verdict == "anomaly") return kNonConvergence;
  return kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brascamp-Lieb constants, certificates and heat-flow checks"};
  app.require_subcommand(1);
  Options o;

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Problem&, const Options&);
  };
  const Command commands[] = {
      {"finiteness", "decide membership of 1/p in the basis polytope", cmd_finiteness},
      {"constant", "Gaussian constant D", cmd_constant},
      {"solve-c", "solve the s-system and build C", cmd_solve_c},
      {"verify", "check concavity, PDE, rank, homogeneity and integrability", cmd_verify},
      {"flow", "heat-flow energy trace", cmd_flow},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("file", o.file, "problem file (JSON)")->required();
    sub->add_option("--tol", o.tol, "main tolerance of the subcommand");
    sub->add_option("--grid", o.grid, "number of log-spaced positive times (flow)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--tmax", o.tmax, "last time of the grid (flow)")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "write the report here instead of stdout");
    sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kInput;
  }

  for (const auto& c : commands) {
    if (!app.got_subcommand(c.name)) continue;
    try {
      const Problem p = load_problem(o.file);
      return c.run(p, o);
    } catch (const Error& e) {
      std::cerr << "blflow " << c.name << ": " << e.what() << " [" << to_string(e.kind()) << "]\n";
      return exit_code(e.kind());
    } catch (const std::exception& e) {
      std::cerr << "blflow " << c.name << ": " << e.what() << "\n";
      return kInput;
    }
  }
  return kInput;
}
