// Command-line front end: every subcommand assembles a ScenarioConfig (from
// --config plus flag overrides, or pure defaults) and hands it to the runner,
// which writes the artifacts.  Exit status: 0 all certificates PASS, 1 any
// FAIL or experiment failure, 2 usage/config errors.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfsi/config.hpp"
#include "cfsi/runner.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<double> lambda, h, theta, size, newton_tol, mu, H, Lrect;
  std::optional<double> gamma, K_b, K_t, c_theta, tol_h, tol_phi, body_refine;
  std::optional<int> U, picard_iters, jobs;
  std::optional<std::string> out_dir, side, profile;
  std::vector<double> lambda_grid, h_grid, theta_grid, gaps, ellipse, coeffs_in, coeffs_out;
  bool symmetric = false;
  bool no_plots = false;
};

void add_common(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_path, "scenario JSON file (defaults apply without it)");
  cmd->add_option("--out", ov.out_dir, "output directory");
  cmd->add_option("--jobs", ov.jobs, "sweep worker cap (0 = library default)");
  cmd->add_flag("--no-plots", ov.no_plots, "skip SVG artifacts");
  cmd->add_option("--lambda", ov.lambda, "wind speed");
  cmd->add_option("--lambda-grid", ov.lambda_grid, "ascending wind speeds")->delimiter(',');
  cmd->add_option("--offset", ov.h, "body offset (config key body/h)");
  cmd->add_option("--offset-grid", ov.h_grid, "body offsets")->delimiter(',');
  cmd->add_option("--theta", ov.theta, "body tilt");
  cmd->add_option("--theta-grid", ov.theta_grid, "body tilts")->delimiter(',');
  cmd->add_option("--gaps", ov.gaps, "wall-gap sequence for asymptotics")->delimiter(',');
  cmd->add_option("--side", ov.side, "approach side: bottom | top");
  cmd->add_option("--size", ov.size, "target mesh edge length");
  cmd->add_option("--body-refine", ov.body_refine, "extra refinement factor at the body");
  cmd->add_option("--newton-tol", ov.newton_tol, "nonlinear residual tolerance");
  cmd->add_option("--picard-iters", ov.picard_iters, "Picard warm-up sweeps");
  cmd->add_option("--mu", ov.mu, "viscosity");
  cmd->add_option("--H", ov.H, "channel half-height");
  cmd->add_option("--Lrect", ov.Lrect, "channel half-length");
  cmd->add_option("--profile", ov.profile, "inflow kind: couette | custom-polynomial");
  cmd->add_option("--U", ov.U, "top-wall speed (0 or 1)");
  cmd->add_option("--coeffs-in", ov.coeffs_in, "inlet polynomial coefficients")->delimiter(',');
  cmd->add_option("--coeffs-out", ov.coeffs_out, "outlet polynomial coefficients")
      ->delimiter(',');
  cmd->add_flag("--symmetric", ov.symmetric, "both walls driven (symmetric matching)");
  cmd->add_option("--ellipse", ov.ellipse, "body semi-axes a,b")->expected(2)->delimiter(',');
  cmd->add_option("--gamma", ov.gamma, "restoring-force slope");
  cmd->add_option("--K-b", ov.K_b, "bottom blow-up strength");
  cmd->add_option("--K-t", ov.K_t, "top blow-up strength");
  cmd->add_option("--c-theta", ov.c_theta, "tilt coupling");
  cmd->add_option("--tol-h", ov.tol_h, "root tolerance on the offset");
  cmd->add_option("--tol-phi", ov.tol_phi, "root tolerance on the force residual");
}

cfsi::ScenarioConfig assemble(const Overrides& ov, std::optional<cfsi::ExperimentKind> kind) {
  cfsi::ScenarioConfig cfg;
  if (!ov.config_path.empty()) cfg = cfsi::load_config(ov.config_path);
  if (kind) cfg.kind = *kind;

  if (ov.H || ov.Lrect)
    cfg.channel = cfsi::Channel(ov.Lrect.value_or(cfg.channel.Lrect),
                                ov.H.value_or(cfg.channel.H));
  if (ov.mu) cfg.mu = *ov.mu;
  if (ov.profile) cfg.profile_kind = *ov.profile;
  if (ov.U) cfg.U = *ov.U;
  if (!ov.coeffs_in.empty()) cfg.coeffs_in = ov.coeffs_in;
  if (!ov.coeffs_out.empty()) cfg.coeffs_out = ov.coeffs_out;
  if (cfg.coeffs_out.empty()) cfg.coeffs_out = cfg.coeffs_in;
  if (ov.symmetric) cfg.symmetric = true;
  if (!ov.ellipse.empty()) cfg.shape = cfsi::BodyShape::ellipse(ov.ellipse[0], ov.ellipse[1]);
  if (ov.h) cfg.h = *ov.h;
  if (!ov.h_grid.empty()) cfg.h_grid = ov.h_grid;
  if (ov.theta) cfg.theta = *ov.theta;
  if (!ov.theta_grid.empty()) cfg.theta_grid = ov.theta_grid;
  if (ov.size) cfg.mesh.size = *ov.size;
  if (ov.body_refine) cfg.mesh.body_refine = *ov.body_refine;
  if (ov.newton_tol) cfg.solver.newton_tol = *ov.newton_tol;
  if (ov.picard_iters) cfg.solver.picard_iters = *ov.picard_iters;
  if (ov.gamma) cfg.gamma = *ov.gamma;
  if (ov.K_b) cfg.K_b = *ov.K_b;
  if (ov.K_t) cfg.K_t = *ov.K_t;
  if (ov.c_theta) cfg.c_theta = *ov.c_theta;
  if (ov.lambda) cfg.lambda = *ov.lambda;
  if (!ov.lambda_grid.empty()) cfg.lambda_grid = ov.lambda_grid;
  if (!ov.gaps.empty()) cfg.gaps = ov.gaps;
  if (ov.side) cfg.side = *ov.side;
  if (ov.tol_h) cfg.tol_h = *ov.tol_h;
  if (ov.tol_phi) cfg.tol_phi = *ov.tol_phi;
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
  if (ov.no_plots) cfg.plots = false;
  if (ov.jobs) cfg.jobs = *ov.jobs;
  return cfg;
}

int execute(const cfsi::ScenarioConfig& cfg) {
  const cfsi::RunResult res = cfsi::run_scenario(cfg);
  for (const cfsi::Artifact& a : res.artifacts)
    std::printf("%s  %s/%s\n", a.sha256.c_str(), res.out_dir.c_str(), a.name.c_str());
  for (const std::string& f : res.failures) std::fprintf(stderr, "failure: %s\n", f.c_str());
  std::printf("result: %s\n", res.all_pass ? "PASS" : "FAIL");
  return res.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steady channel-flow laboratory: lift, equilibria, and certificates"};
  app.require_subcommand(1);

  std::string run_config;
  CLI::App* run = app.add_subcommand("run", "execute the experiment a scenario file declares");
  run->add_option("config", run_config, "scenario JSON file")->required();
  Overrides run_ov;
  run->add_option("--out", run_ov.out_dir, "override the output directory");
  run->add_option("--jobs", run_ov.jobs, "sweep worker cap");

  CLI::App* schema = app.add_subcommand("schema", "print the accepted config keys");

  const std::pair<const char*, cfsi::ExperimentKind> kinds[] = {
      {"solve", cfsi::ExperimentKind::Solve},
      {"lift", cfsi::ExperimentKind::Lift},
      {"equilibrium", cfsi::ExperimentKind::Equilibrium},
      {"continuation", cfsi::ExperimentKind::Continuation},
      {"sweep-theta", cfsi::ExperimentKind::SweepTheta},
      {"asymptotics", cfsi::ExperimentKind::Asymptotics},
      {"symmetry", cfsi::ExperimentKind::Symmetry},
      {"mms", cfsi::ExperimentKind::Mms},
      {"mesh-dump", cfsi::ExperimentKind::MeshDump},
  };
  std::vector<std::pair<CLI::App*, Overrides>> cmds;
  cmds.reserve(std::size(kinds));
  for (const auto& [name, kind] : kinds) {
    (void)kind;
    cmds.emplace_back(app.add_subcommand(name, std::string("run the ") + name + " experiment"),
                      Overrides{});
  }
  for (auto& [cmd, ov] : cmds) add_common(cmd, ov);

  CLI11_PARSE(app, argc, argv);

  try {
    if (schema->parsed()) {
      std::fputs(cfsi::config_schema().c_str(), stdout);
      return 0;
    }
    if (run->parsed()) {
      cfsi::ScenarioConfig cfg = cfsi::load_config(run_config);
      if (run_ov.out_dir) cfg.out_dir = *run_ov.out_dir;
      if (run_ov.jobs) cfg.jobs = *run_ov.jobs;
      return execute(cfg);
    }
    for (std::size_t i = 0; i < cmds.size(); ++i)
      if (cmds[i].first->parsed())
        return execute(assemble(cmds[i].second, kinds[i].second));
  } catch (const cfsi::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
