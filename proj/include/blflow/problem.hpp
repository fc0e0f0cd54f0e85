#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "blflow/bellman.hpp"
#include "blflow/core_model.hpp"
#include "blflow/heat_flow.hpp"

namespace blflow {

/// A problem file: the vector system plus whatever the subcommands need.
///
///   {"k": 2, "n": 3, "A": [row-major k*n numbers], "inv_p": [...],
///    "B": {"variant": "young", "alpha": [...]},
///    "profiles": [{"type": "box", "lo": 0, "hi": 1, "height": 1}, ...],
///    "C": [row-major k*k], "seed": 0, "tolerances": {"quad_tol": 1e-10}}
///
/// Only k, n and A are required. Matrices may also be given as nested rows.
struct Problem {
  VectorSystem sys;
  std::optional<Exponents> exponents;
  std::optional<BellmanSpec> bellman;
  std::vector<ProfileSpec> profiles;
  std::optional<MatrixXd> C;
  std::uint64_t seed = 0;
  Tolerances tol;
  // Overrides exactly as given, kept for re-serialization.
  std::map<std::string, double> tol_overrides;
};

/// Throws Error(Input) on malformed JSON or fields, Structural on rank loss.
Problem parse_problem(const std::string& text);
Problem load_problem(const std::string& path);

/// Canonical form: sorted keys, two-space indent, trailing newline.
std::string serialize_problem(const Problem& p);

/// Applies one named override to a Tolerances object. Throws Input on an
/// unknown name.
void set_tolerance(Tolerances& tol, const std::string& name, double value);

}  // namespace blflow
