#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cfsi/fsi.hpp"

namespace cfsi {

/// Rejected scenario file; `key` is the slash-separated path of the offending
/// entry ("body/shape/kind"), empty for document-level syntax errors.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, std::string key_path)
      : std::runtime_error(key_path.empty() ? msg : key_path + ": " + msg),
        key(std::move(key_path)) {}
  std::string key;
};

enum class ExperimentKind {
  Solve,
  Lift,
  Equilibrium,
  Continuation,
  SweepTheta,
  Asymptotics,
  Symmetry,
  Mms,
  MeshDump,
};
const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from(const std::string& name);  // throws ConfigError

/// One scenario file, fully validated: geometry, fluid and inflow data, the
/// restoring-force parameters, numerical options, and the experiment block.
/// Every key is optional except experiment/kind; unknown keys are rejected.
struct ScenarioConfig {
  Channel channel{1.5, 1.0};
  double mu = 1.0;

  // inflow: "couette" needs only U; "custom-polynomial" takes coefficient
  // lists for both sides (low order first) and an optional symmetric flag
  std::string profile_kind = "couette";
  int U = 1;
  std::vector<double> coeffs_in, coeffs_out;
  bool symmetric = false;

  // body and placement
  BodyShape shape = BodyShape::ellipse(0.25, 0.25);
  double h = 0.0;
  std::vector<double> h_grid;
  double theta = 0.0;
  std::vector<double> theta_grid;

  MeshOptions mesh;
  SolverOptions solver;

  double gamma = 5.0, K_b = 0.1, K_t = 0.1, c_theta = 0.0;

  ExperimentKind kind = ExperimentKind::Solve;
  double lambda = 0.0;
  std::vector<double> lambda_grid;
  std::vector<double> gaps;    // asymptotics gap sequence (empty: defaults)
  std::string side = "bottom"; // asymptotics approach side
  double tol_h = -1.0, tol_phi = -1.0;  // negative: module defaults

  std::string out_dir = "out";
  bool plots = true;
  unsigned seed = 1234;
  int jobs = 0;  // sweep worker cap; 0 = library default
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);

/// The accepted keys, their types and defaults, as a plain-text listing (the
/// documented schema; also what error messages refer to).
std::string config_schema();

// Assembled library inputs.  make_problem applies `lambda` and the single
// h/theta placement; grid-based experiments override per point.
FlowProblem make_problem(const ScenarioConfig& cfg);
RestoringForce make_model(const ScenarioConfig& cfg);
FsiOptions make_fsi_options(const ScenarioConfig& cfg);

}  // namespace cfsi
