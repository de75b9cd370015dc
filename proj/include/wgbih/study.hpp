#pragma once

// Convergence studies and verification sweeps driven by a StudyConfig.
//
// Config file: one `key = value` per line, `#` starts a comment. Keys:
//   k, p, q, r_mode (nonconvex|convex|custom), r, mesh (square|nonconvex),
//   levels (comma separated n), solution (trig|poly), solver (direct|cg),
//   tolerance, trials, seed, out

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wgbih/analysis.hpp"
#include "wgbih/solver.hpp"
#include "wgbih/weak_laplacian.hpp"

namespace wgbih {

struct StudyConfig {
  int k = 2;
  int p = -1; // -1: defaults to k
  int q = -1; // -1: defaults to k - 1
  RMode r_mode = RMode::nonconvex;
  int r = -1;
  std::string mesh = "square";
  std::vector<int> levels{4, 8, 16, 32};
  std::string solution = "trig";
  SolverKind solver = SolverKind::direct;
  double tolerance = 1e-13;
  int trials = 200;
  std::uint64_t seed = 20240601;
  std::string out;

  WeakDofLayout layout() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;

  bool operator==(const StudyConfig&) const = default;
};

/// Parses a config file body. `source` names the input in diagnostics.
StudyConfig parse_config(const std::string& text, const std::string& source = "config");
/// Applies one `key=value` setting (flag overrides use source "--key").
void apply_setting(StudyConfig& config, const std::string& key, const std::string& value,
                   const std::string& where);
std::string serialize_config(const StudyConfig& config);

std::string to_string(RMode mode);
std::string to_string(SolverKind kind);

PolyMesh make_mesh(const std::string& family, int n);
ManufacturedSolution make_solution(const std::string& name, int k);

struct LevelResult {
  int level = 0;
  int n = 0;
  ErrorReport errors;
  double energy_rate = 0.0; // NaN on the first level
  double l2_rate = 0.0;
  double relative_residual = 0.0;
};

/// One solve per level. Throws NotPositiveDefinite / NoConvergence from the solver.
std::vector<LevelResult> run_convergence(const StudyConfig& config);

/// CSV: level,n,h,ndof,energy_err,h2_err,l2_err,energy_rate,l2_rate
void write_csv(std::ostream& out, const std::vector<LevelResult>& results);

/// Solves once on `mesh` with the config's layout and solution.
LevelResult run_single(const StudyConfig& config, const PolyMesh& mesh);

/// Named single-cell shapes used by the verification sweeps.
struct ReferenceShape {
  std::string name;
  PolyMesh mesh;
};
std::vector<ReferenceShape> reference_shapes();

/// Runs the verification sweeps and prints a report. Returns true when every
/// invariant holds.
bool run_verify(const StudyConfig& config, std::ostream& report);

} // namespace wgbih
