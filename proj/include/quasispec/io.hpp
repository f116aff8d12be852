#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "quasispec/moments.hpp"
#include "quasispec/operators.hpp"
#include "quasispec/perturb_lab.hpp"
#include "quasispec/rootfinder.hpp"
#include "quasispec/types.hpp"

namespace quasispec {

using Json = nlohmann::json;  // map-backed: object keys iterate sorted

// Optional per-scenario overrides of analysis knobs.
struct Tolerances {
  std::optional<int> moment_horizon;
  std::optional<double> zero_threshold;
  std::optional<double> match_cutoff;
};

// A fully validated scenario: the operator, the rank-one perturbation, the
// alpha grid, and the search annulus. echo holds the canonicalized input
// document (exactly the accepted fields), so re-parsing the echo reproduces
// the same scenario.
struct Scenario {
  OperatorModel op;
  RankOnePerturbation pert;
  std::vector<Scalar> alphas;
  Annulus annulus;
  bool annulus_defaulted = false;
  Tolerances tol;
  int oracle_dim = 0;  // resolved: explicit oracle_dim or the operator dim
  Json echo;
};

// Parse and validate a scenario document. Malformed JSON throws ParseError;
// schema violations throw ValidationError whose message starts with the JSON
// path of the offending field (e.g. "$.annulus"). Unknown fields are rejected.
Scenario parse_scenario(const std::string& text);

// parse_scenario over the contents of a file; unreadable files throw ParseError.
Scenario load_scenario_file(const std::string& path);

// Canonical serialization: object keys sorted, floating-point numbers as
// %.12e, integers verbatim, two-space indent. Canonicalization is idempotent:
// parse(canonical_json(j)) re-serializes to the same bytes.
std::string canonical_json(const Json& j);

// {"im": ..., "re": ...} with both parts as floats.
Json complex_json(Scalar z);

Json classification_json(const Classification& c);

// Options collected from the command line.
struct CommandOptions {
  std::optional<Scalar> alpha_override;    // --alpha: replaces the scenario grid
  std::optional<Annulus> annulus_override; // --annulus RMIN RMAX
  int top = 3;                             // certify: roots per certificate
  std::optional<int> basis_tail;           // certify: explicit basis e_j..e_N instead
  std::vector<int> dims;                   // trend: explicit truncation dims
  std::string format = "json";             // json | csv
  int threads = 1;                         // from QUASISPEC_THREADS
};

struct CommandResult {
  std::string text;   // rendered report (JSON or CSV), newline-terminated
  int exit_code = 0;  // 0 ok; 2 when the report itself exposes an invariant breach
};

// Dispatch one CLI command against a validated scenario. command is one of
// classify, roots, sweep, validate, certify, trend. Errors throw; the caller
// maps them to exit codes (ValidationError/ParseError/... -> 1,
// InvariantViolation -> 2).
CommandResult run_command(const std::string& command, const Scenario& sc,
                          const CommandOptions& opts);

// Parse "RE" or "RE+IMi" / "RE-IMi" (e.g. "1", "-0.5", "2e-3+1.5i").
Scalar parse_alpha(const std::string& text);

// Parse a comma-separated list of positive integers ("25,50,100").
std::vector<int> parse_dims(const std::string& text);

}  // namespace quasispec
