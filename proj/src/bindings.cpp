// Python surface of the toolkit: geometry, inflow profiles, the flow solver
// with both lift evaluations, the restoring-force model with its equilibrium
// machinery, and the config-driven experiment runner.  Heavy calls drop the
// GIL.  Results come back as plain read-only records; nothing on the Python
// side holds references into solver internals.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>
#include <vector>

#include "cfsi/config.hpp"
#include "cfsi/fsi.hpp"
#include "cfsi/geometry.hpp"
#include "cfsi/lift.hpp"
#include "cfsi/mesh.hpp"
#include "cfsi/ns_solver.hpp"
#include "cfsi/profiles.hpp"
#include "cfsi/runner.hpp"
#include "cfsi/sha256.hpp"

namespace py = pybind11;
using namespace cfsi;

namespace {

// one triangulate + solve + both lift evaluations, flattened into a value
// type so no Python object ever points into a dead mesh
struct SolveSummary {
  bool converged = false;
  int newton_iters = 0;
  double final_residual = 0.0;
  int triangles = 0;
  int velocity_unknowns = 0;
  double u_l2 = 0.0, u_h1 = 0.0, p_l2 = 0.0;
  double lift_boundary = 0.0, lift_volume = 0.0, discrepancy = 0.0;
};

SolveSummary run_solve(const FlowProblem& prob, const MeshOptions& mesh_opts,
                       const SolverOptions& solver_opts) {
  const Mesh mesh = triangulate(prob.channel, prob.shape, prob.placement, mesh_opts);
  const FlowField field = solve_navier_stokes(prob, mesh, solver_opts);
  const FieldNorms norms = diff_norms(field, nullptr, nullptr);
  const LiftResult lr = evaluate_lift(field, prob);
  SolveSummary s;
  s.converged = field.report.converged;
  s.newton_iters = field.report.newton_iters;
  s.final_residual = field.report.final_residual;
  s.triangles = static_cast<int>(mesh.tris.size());
  s.velocity_unknowns = 2 * mesh.n_p2_nodes();
  s.u_l2 = norms.u_l2;
  s.u_h1 = norms.u_h1;
  s.p_l2 = norms.p_l2;
  s.lift_boundary = lr.value_boundary;
  s.lift_volume = lr.value_volume;
  s.discrepancy = lr.discrepancy;
  return s;
}

double probe_uniqueness(const FlowProblem& prob, const MeshOptions& mesh_opts, int n_starts,
                        unsigned seed, const SolverOptions& solver_opts) {
  const Mesh mesh = triangulate(prob.channel, prob.shape, prob.placement, mesh_opts);
  return uniqueness_probe(prob, mesh, n_starts, seed, solver_opts);
}

InflowProfile make_polynomial(const std::vector<double>& coeffs_in,
                              const std::vector<double>& coeffs_out, double U, double H,
                              bool symmetric) {
  return InflowProfile::polynomial(
      Poly(coeffs_in), Poly(coeffs_out.empty() ? coeffs_in : coeffs_out), U, H,
      symmetric ? InflowProfile::Mode::Symmetric : InflowProfile::Mode::Standard);
}

BodyShape make_polygon(const std::vector<std::pair<double, double>>& vertices, double rounding) {
  std::vector<Vec2> pts;
  pts.reserve(vertices.size());
  for (const auto& [x, y] : vertices) pts.push_back({x, y});
  return BodyShape::rounded_polygon(std::move(pts), rounding);
}

}  // namespace

PYBIND11_MODULE(channelfsi, m) {
  m.doc() = "steady channel-flow laboratory: lift, equilibria, and certificates";

  // ------------------------------------------------------------- exceptions
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<ProfileError>(m, "ProfileError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);
  py::register_exception<NoSignChange>(m, "NoSignChange", PyExc_RuntimeError);

  // --------------------------------------------------------------- geometry
  py::class_<Channel>(m, "Channel", "rectangular channel (-Lrect, Lrect) x (-H, H)")
      .def(py::init<double, double>(), py::arg("Lrect"), py::arg("H"))
      .def_readonly("Lrect", &Channel::Lrect)
      .def_readonly("H", &Channel::H);

  py::class_<BodyShape>(m, "BodyShape", "rigid cross-section with a smooth boundary")
      .def_static("ellipse", &BodyShape::ellipse, py::arg("a"), py::arg("b"))
      .def_static("rounded_polygon", &make_polygon, py::arg("vertices"),
                  py::arg("rounding") = -1.0,
                  "convex polygon with circular-arc corners; rounding < 0 picks 10% of "
                  "the shortest edge")
      .def_property_readonly("area", &BodyShape::area)
      .def_property_readonly("perimeter", &BodyShape::perimeter)
      .def_property_readonly("mirror_symmetric", &BodyShape::mirror_symmetric)
      .def_property_readonly("is_ellipse", &BodyShape::is_ellipse);

  py::class_<Placement>(m, "Placement", "vertical offset h and tilt theta of the body")
      .def(py::init([](double h, double theta) { return Placement{h, theta}; }),
           py::arg("h") = 0.0, py::arg("theta") = 0.0)
      .def_readwrite("h", &Placement::h)
      .def_readwrite("theta", &Placement::theta);

  py::class_<Extents>(m, "Extents")
      .def_readonly("delta_b", &Extents::delta_b)
      .def_readonly("delta_t", &Extents::delta_t)
      .def_readonly("tau", &Extents::tau);
  py::class_<Gaps>(m, "Gaps")
      .def_readonly("eps_b", &Gaps::eps_b)
      .def_readonly("eps_t", &Gaps::eps_t);
  m.def("body_extents", &body_extents, py::arg("shape"), py::arg("theta"),
        "vertical and horizontal extents of the rotated body");
  m.def("gaps", &gaps, py::arg("channel"), py::arg("extents"), py::arg("h"),
        "wall gaps of the placed body");
  m.def("is_admissible", &is_admissible, py::arg("channel"), py::arg("shape"),
        py::arg("placement"), py::arg("margin"),
        "true when the placed body keeps more than `margin` from both walls");

  // --------------------------------------------------------------- profiles
  py::class_<InflowProfile>(m, "InflowProfile",
                            "inlet/outlet data V_in, V_out with the wall speed U")
      .def_static("couette", &InflowProfile::couette, py::arg("U"), py::arg("H"))
      .def_static("poiseuille", &InflowProfile::poiseuille, py::arg("vmax"), py::arg("H"))
      .def_static("uniform", &InflowProfile::uniform, py::arg("U"), py::arg("H"),
                  "plug flow between two walls moving at U (symmetric mode)")
      .def_static("polynomial", &make_polynomial, py::arg("coeffs_in"),
                  py::arg("coeffs_out") = std::vector<double>{}, py::arg("U") = 1.0,
                  py::arg("H") = 1.0, py::arg("symmetric") = false,
                  "arbitrary polynomial pair; matching conditions are validated")
      .def("V_in", &InflowProfile::V_in, py::arg("x2"))
      .def("V_out", &InflowProfile::V_out, py::arg("x2"))
      .def_property_readonly("flux", &InflowProfile::flux)
      .def_property_readonly("U", &InflowProfile::U)
      .def_property_readonly("H", &InflowProfile::H)
      .def_property_readonly("symmetric", [](const InflowProfile& p) {
        return p.mode() == InflowProfile::Mode::Symmetric;
      });

  // ----------------------------------------------------------------- solver
  py::class_<MeshOptions>(m, "MeshOptions")
      .def(py::init<>())
      .def_readwrite("size", &MeshOptions::size)
      .def_readwrite("body_refine", &MeshOptions::body_refine)
      .def_readwrite("grading", &MeshOptions::grading)
      .def_readwrite("gap_refine", &MeshOptions::gap_refine)
      .def_readwrite("relax_iters", &MeshOptions::relax_iters)
      .def_readwrite("min_angle_deg", &MeshOptions::min_angle_deg)
      .def_readwrite("max_points", &MeshOptions::max_points);

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("picard_iters", &SolverOptions::picard_iters)
      .def_readwrite("newton_tol", &SolverOptions::newton_tol)
      .def_readwrite("max_newton", &SolverOptions::max_newton)
      .def_readwrite("max_damping", &SolverOptions::max_damping);

  py::class_<FlowProblem>(m, "FlowProblem",
                          "stationary channel flow past the placed body; boundary data "
                          "scaled by lam")
      .def(py::init([](const Channel& ch, const BodyShape& shape, const Placement& pl,
                       const InflowProfile& prof, double mu, double lam, bool symmetric_mode) {
             return FlowProblem{ch, shape, pl, prof, mu, lam, symmetric_mode, nullptr, nullptr};
           }),
           py::arg("channel"), py::arg("shape"), py::arg("placement"), py::arg("profile"),
           py::arg("mu") = 1.0, py::arg("lam") = 0.0, py::arg("symmetric_mode") = false)
      .def_readwrite("channel", &FlowProblem::channel)
      .def_readwrite("shape", &FlowProblem::shape)
      .def_readwrite("placement", &FlowProblem::placement)
      .def_readwrite("profile", &FlowProblem::profile)
      .def_readwrite("mu", &FlowProblem::mu)
      .def_readwrite("lam", &FlowProblem::lambda)
      .def_readwrite("symmetric_mode", &FlowProblem::symmetric_mode);

  py::class_<SolveSummary>(m, "SolveSummary")
      .def_readonly("converged", &SolveSummary::converged)
      .def_readonly("newton_iters", &SolveSummary::newton_iters)
      .def_readonly("final_residual", &SolveSummary::final_residual)
      .def_readonly("triangles", &SolveSummary::triangles)
      .def_readonly("velocity_unknowns", &SolveSummary::velocity_unknowns)
      .def_readonly("u_l2", &SolveSummary::u_l2)
      .def_readonly("u_h1", &SolveSummary::u_h1)
      .def_readonly("p_l2", &SolveSummary::p_l2)
      .def_readonly("lift_boundary", &SolveSummary::lift_boundary)
      .def_readonly("lift_volume", &SolveSummary::lift_volume)
      .def_readonly("discrepancy", &SolveSummary::discrepancy);

  m.def("solve", &run_solve, py::arg("problem"), py::arg("mesh") = MeshOptions{},
        py::arg("solver") = SolverOptions{}, py::call_guard<py::gil_scoped_release>(),
        "triangulate, solve, and evaluate the lift both ways");

  m.def("uniqueness_probe", &probe_uniqueness, py::arg("problem"),
        py::arg("mesh") = MeshOptions{}, py::arg("n_starts") = 3, py::arg("seed") = 1234,
        py::arg("solver") = SolverOptions{}, py::call_guard<py::gil_scoped_release>(),
        "max pairwise H1 distance between solves from randomized initial guesses");

  py::class_<LiftCurveRow>(m, "LiftCurveRow")
      .def_readonly("h", &LiftCurveRow::h)
      .def_readonly("eps_b", &LiftCurveRow::eps_b)
      .def_readonly("eps_t", &LiftCurveRow::eps_t)
      .def_readonly("lift_boundary", &LiftCurveRow::lift_boundary)
      .def_readonly("lift_volume", &LiftCurveRow::lift_volume)
      .def_readonly("discrepancy", &LiftCurveRow::discrepancy)
      .def_readonly("newton_iters", &LiftCurveRow::newton_iters)
      .def_readonly("ok", &LiftCurveRow::ok)
      .def_readonly("error", &LiftCurveRow::error);

  m.def("lift_curve", &lift_curve, py::arg("problem"), py::arg("h_grid"),
        py::arg("mesh") = MeshOptions{}, py::arg("solver") = SolverOptions{},
        py::call_guard<py::gil_scoped_release>(),
        "one mesh and one converged solve per offset; failures land in their row");

  // ------------------------------------------------- restoring force + fsi
  py::class_<RestoringForce>(m, "RestoringForce",
                             "elastic restoring force: linear part of slope gamma plus "
                             "wall-gap blow-up terms")
      .def(py::init([](const Channel& ch, const BodyShape& shape, double gamma, double K_b,
                       double K_t, int U, double c_theta) {
             RestoringForce f;
             f.channel = ch;
             f.shape = shape;
             f.gamma = gamma;
             f.K_b = K_b;
             f.K_t = K_t;
             f.U = U;
             f.c_theta = c_theta;
             return f;
           }),
           py::arg("channel"), py::arg("shape"), py::arg("gamma") = 5.0, py::arg("K_b") = 0.1,
           py::arg("K_t") = 0.1, py::arg("U") = 1, py::arg("c_theta") = 0.0)
      .def_readwrite("channel", &RestoringForce::channel)
      .def_readwrite("shape", &RestoringForce::shape)
      .def_readwrite("gamma", &RestoringForce::gamma)
      .def_readwrite("K_b", &RestoringForce::K_b)
      .def_readwrite("K_t", &RestoringForce::K_t)
      .def_readwrite("U", &RestoringForce::U)
      .def_readwrite("c_theta", &RestoringForce::c_theta);

  m.def("restoring_force", &restoring_force, py::arg("model"), py::arg("h"));
  m.def("restoring_force_theta", &restoring_force_theta, py::arg("model"), py::arg("h"),
        py::arg("theta"));

  py::class_<FsiOptions>(m, "FsiOptions")
      .def(py::init<>())
      .def_readwrite("mesh", &FsiOptions::mesh)
      .def_readwrite("solver", &FsiOptions::solver)
      .def_readwrite("tol_h", &FsiOptions::tol_h)
      .def_readwrite("tol_phi", &FsiOptions::tol_phi)
      .def_readwrite("bracket_h0", &FsiOptions::bracket_h0)
      .def_readwrite("admissibility_margin", &FsiOptions::admissibility_margin)
      .def_readwrite("max_root_iters", &FsiOptions::max_root_iters)
      .def_readwrite("threads", &FsiOptions::threads);

  py::class_<SolveDiag>(m, "SolveDiag")
      .def_readonly("lam", &SolveDiag::lambda)
      .def_readonly("h", &SolveDiag::h)
      .def_readonly("newton_iters", &SolveDiag::newton_iters)
      .def_readonly("final_residual", &SolveDiag::final_residual)
      .def_readonly("retried", &SolveDiag::retried)
      .def_readonly("from_shortcut", &SolveDiag::from_shortcut);

  py::class_<GlobalForce>(m, "GlobalForce",
                          "phi = restoring force minus lift; equilibria are its zeros")
      .def_readonly("phi", &GlobalForce::phi)
      .def_readonly("f_restoring", &GlobalForce::f_restoring)
      .def_readonly("lift", &GlobalForce::lift)
      .def_readonly("diag", &GlobalForce::diag);

  m.def("global_force", &global_force, py::arg("problem"), py::arg("model"), py::arg("h"),
        py::arg("options") = FsiOptions{}, py::call_guard<py::gil_scoped_release>());

  py::class_<BracketStep>(m, "BracketStep")
      .def_readonly("a", &BracketStep::a)
      .def_readonly("b", &BracketStep::b)
      .def_readonly("phi_a", &BracketStep::phi_a)
      .def_readonly("phi_b", &BracketStep::phi_b);

  py::class_<EquilibriumResult>(m, "EquilibriumResult")
      .def_readonly("lam", &EquilibriumResult::lambda)
      .def_readonly("h_star", &EquilibriumResult::h_star)
      .def_readonly("phi_at_root", &EquilibriumResult::phi_at_root)
      .def_readonly("lift_at_root", &EquilibriumResult::lift_at_root)
      .def_readonly("bracket_a", &EquilibriumResult::bracket_a)
      .def_readonly("bracket_b", &EquilibriumResult::bracket_b)
      .def_readonly("phi_a", &EquilibriumResult::phi_a)
      .def_readonly("phi_b", &EquilibriumResult::phi_b)
      .def_readonly("iterations", &EquilibriumResult::iterations)
      .def_readonly("history", &EquilibriumResult::history)
      .def_readonly("solves", &EquilibriumResult::solves)
      .def_readonly("warnings", &EquilibriumResult::warnings);

  m.def(
      "find_equilibrium",
      [](const FlowProblem& prob, const RestoringForce& model, const FsiOptions& opts) {
        return find_equilibrium(prob, model, opts);
      },
      py::arg("problem"), py::arg("model"), py::arg("options") = FsiOptions{},
      py::call_guard<py::gil_scoped_release>(),
      "root of the global force; the bracket expands from the channel axis");
  m.def(
      "find_equilibrium",
      [](const FlowProblem& prob, const RestoringForce& model, double a, double b,
         const FsiOptions& opts) { return find_equilibrium(prob, model, a, b, opts); },
      py::arg("problem"), py::arg("model"), py::arg("a"), py::arg("b"),
      py::arg("options") = FsiOptions{}, py::call_guard<py::gil_scoped_release>(),
      "root of the global force on [a, b]; requires phi(a) < 0 < phi(b)");

  py::class_<ContinuationPoint>(m, "ContinuationPoint")
      .def_readonly("lam", &ContinuationPoint::lambda)
      .def_readonly("ok", &ContinuationPoint::ok)
      .def_readonly("eq", &ContinuationPoint::eq)
      .def_readonly("error", &ContinuationPoint::error);

  py::class_<ContinuationCurve>(m, "ContinuationCurve")
      .def_readonly("points", &ContinuationCurve::points)
      .def_readonly("max_step", &ContinuationCurve::max_step)
      .def_readonly("truncated", &ContinuationCurve::truncated);

  m.def("continuation", &continuation, py::arg("problem"), py::arg("model"),
        py::arg("lambda_grid"), py::arg("options") = FsiOptions{},
        py::call_guard<py::gil_scoped_release>(),
        "warm-started equilibrium path along an ascending wind grid");

  py::class_<ScanRow>(m, "ScanRow")
      .def_readonly("h", &ScanRow::h)
      .def_readonly("phi", &ScanRow::phi)
      .def_readonly("lift", &ScanRow::lift)
      .def_readonly("ok", &ScanRow::ok)
      .def_readonly("error", &ScanRow::error);

  py::class_<ScanResult>(m, "ScanResult")
      .def_readonly("rows", &ScanResult::rows)
      .def_readonly("all_ok", &ScanResult::all_ok)
      .def_readonly("strictly_increasing", &ScanResult::strictly_increasing);

  m.def("monotonicity_scan", &monotonicity_scan, py::arg("problem"), py::arg("model"),
        py::arg("lam"), py::arg("h_grid"), py::arg("options") = FsiOptions{},
        py::call_guard<py::gil_scoped_release>(),
        "global force over an offset grid, with a strict-monotonicity certificate");

  py::class_<SymmetryRow>(m, "SymmetryRow")
      .def_readonly("lam", &SymmetryRow::lambda)
      .def_readonly("lift_boundary", &SymmetryRow::lift_boundary)
      .def_readonly("lift_volume", &SymmetryRow::lift_volume)
      .def_readonly("h_star", &SymmetryRow::h_star)
      .def_readonly("sym_u1", &SymmetryRow::sym_u1)
      .def_readonly("sym_u2", &SymmetryRow::sym_u2)
      .def_readonly("sym_p", &SymmetryRow::sym_p)
      .def_readonly("within_tol", &SymmetryRow::within_tol)
      .def_readonly("report_only", &SymmetryRow::report_only)
      .def_readonly("error", &SymmetryRow::error);

  py::class_<SymmetryReport>(m, "SymmetryReport")
      .def_readonly("rows", &SymmetryReport::rows)
      .def_readonly("certified", &SymmetryReport::certified)
      .def_readonly("violations", &SymmetryReport::violations);

  m.def("symmetry_certificate", &symmetry_certificate, py::arg("problem"), py::arg("model"),
        py::arg("lambdas") = std::vector<double>{0.0, 0.01, 0.05},
        py::arg("certify_below") = 0.051, py::arg("options") = FsiOptions{},
        py::call_guard<py::gil_scoped_release>(),
        "no lift, centered equilibrium, and mirror-exact fields for a symmetric setup");

  py::enum_<ApproachSide>(m, "ApproachSide")
      .value("Bottom", ApproachSide::Bottom)
      .value("Top", ApproachSide::Top);

  py::class_<ExponentFit>(m, "ExponentFit")
      .def_readonly("side", &ExponentFit::side)
      .def_readonly("gaps", &ExponentFit::gaps)
      .def_readonly("lifts", &ExponentFit::lifts)
      .def_readonly("slope", &ExponentFit::slope)
      .def_readonly("fit_rms", &ExponentFit::fit_rms)
      .def_readonly("bound", &ExponentFit::bound)
      .def_readonly("within_bound", &ExponentFit::within_bound)
      .def_readonly("skipped", &ExponentFit::skipped)
      .def_readonly("solves", &ExponentFit::solves);

  m.def("exponent_experiment", &exponent_experiment, py::arg("problem"), py::arg("side"),
        py::arg("gaps") = std::vector<double>{}, py::arg("options") = FsiOptions{},
        py::call_guard<py::gil_scoped_release>(),
        "log-log growth rate of |lift| as the body approaches a wall");

  py::class_<BridgeRow>(m, "BridgeRow")
      .def_readonly("theta", &BridgeRow::theta)
      .def_readonly("delta_b", &BridgeRow::delta_b)
      .def_readonly("delta_t", &BridgeRow::delta_t)
      .def_readonly("admissible", &BridgeRow::admissible)
      .def_readonly("ok", &BridgeRow::ok)
      .def_readonly("eq", &BridgeRow::eq)
      .def_readonly("error", &BridgeRow::error);

  m.def("bridge_sweep", &bridge_sweep, py::arg("problem"), py::arg("model"),
        py::arg("theta_grid"), py::arg("lam"), py::arg("options") = FsiOptions{},
        py::call_guard<py::gil_scoped_release>(),
        "equilibrium offset per deck tilt; inadmissible tilts are flagged per row");

  // ------------------------------------------------------ config and runner
  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_property_readonly("kind",
                             [](const ScenarioConfig& c) { return to_string(c.kind); })
      .def_readwrite("out_dir", &ScenarioConfig::out_dir)
      .def_readwrite("plots", &ScenarioConfig::plots)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("jobs", &ScenarioConfig::jobs);

  m.def("parse_config", &parse_config, py::arg("json_text"),
        "strict JSON config; unknown keys are rejected with their path");
  m.def("load_config", &load_config, py::arg("path"));
  m.def("config_schema", &config_schema, "plain-text listing of every config key");

  py::class_<Artifact>(m, "Artifact")
      .def_readonly("name", &Artifact::name)
      .def_readonly("sha256", &Artifact::sha256);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("all_pass", &RunResult::all_pass)
      .def_readonly("artifacts", &RunResult::artifacts)
      .def_readonly("failures", &RunResult::failures)
      .def_readonly("out_dir", &RunResult::out_dir);

  m.def("run_scenario", &run_scenario, py::arg("config"),
        py::call_guard<py::gil_scoped_release>(),
        "run one experiment end to end: CSV tables, SVG plots, certificate, manifest");

  m.def("sha256_hex", py::overload_cast<const std::string&>(&sha256_hex), py::arg("data"));
  m.def("sha256_file_hex", &sha256_file_hex, py::arg("path"));
}
